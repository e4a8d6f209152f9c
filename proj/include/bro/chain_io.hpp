#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bro {

/// Persisted MCMC chain: post burn-in states plus a small header
/// identifying the chain, the generating configuration, and the seed.
struct ChainFile {
  std::string chain_id;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<double> states;
};

void write_chain(const std::filesystem::path& path, const ChainFile& chain);
ChainFile read_chain(const std::filesystem::path& path);

/// FNV-1a over a configuration fingerprint string.
std::uint64_t fingerprint_hash(const std::string& text);

}  // namespace bro
