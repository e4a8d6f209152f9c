#pragma once

#include <cstdint>
#include <filesystem>

namespace bro::cli {

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::uint64_t seed = 0;
  bool small_scale = false;  // --scale small: desk-sized replication counts and chains
};

int cmd_mcmc(const CommandOptions& opts);
int cmd_optimize(const CommandOptions& opts);
int cmd_benchmark(const CommandOptions& opts);
int cmd_sweep(const CommandOptions& opts);
int cmd_oracle(const CommandOptions& opts);

}  // namespace bro::cli
