#include "bro/chain_io.hpp"

#include <fstream>
#include <stdexcept>

#include "bro/csv.hpp"

namespace bro {

void write_chain(const std::filesystem::path& path, const ChainFile& chain) {
  csv::Writer out(path);
  out.comment("chain_id=" + chain.chain_id);
  out.comment("config_hash=" + std::to_string(chain.config_hash));
  out.comment("seed=" + std::to_string(chain.seed));
  out.row({"state"});
  for (double s : chain.states) out.row({csv::cell(s)});
}

ChainFile read_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain file " + path.string());
  ChainFile chain;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# chain_id=", 0) == 0) {
      chain.chain_id = line.substr(11);
    } else if (line.rfind("# config_hash=", 0) == 0) {
      chain.config_hash = std::stoull(line.substr(14));
    } else if (line.rfind("# seed=", 0) == 0) {
      chain.seed = std::stoull(line.substr(7));
    } else if (line.empty() || line == "state" || line.front() == '#') {
      continue;
    } else {
      chain.states.push_back(std::stod(line));
    }
  }
  if (chain.states.empty()) throw std::runtime_error("chain file has no states: " + path.string());
  return chain;
}

std::uint64_t fingerprint_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace bro
