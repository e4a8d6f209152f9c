#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nested-simulation risk optimization toolkit"};
  app.require_subcommand(1);

  bro::cli::CommandOptions opts;
  std::string scale = "paper";

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config, "configuration file (JSON)")->required();
    cmd->add_option("--seed", opts.seed, "master seed (default 0)");
    cmd->add_option("--scale", scale, "small | paper")->check(CLI::IsMember({"small", "paper"}));
    cmd->add_option("--out", opts.out, "output directory (default .)");
  };

  CLI::App* mcmc = app.add_subcommand("mcmc", "sample posterior chains and run the convergence diagnostic");
  CLI::App* optimize = app.add_subcommand("optimize", "run replicated projected-SA optimization");
  CLI::App* benchmark = app.add_subcommand("benchmark", "optimizer comparison on the quadratic testbed");
  CLI::App* sweep = app.add_subcommand("sweep", "objective-choice study over independent datasets");
  CLI::App* oracle = app.add_subcommand("oracle", "closed-form and brute-force reference values");
  for (CLI::App* cmd : {mcmc, optimize, benchmark, sweep, oracle}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);
  opts.small_scale = (scale == "small");

  try {
    if (mcmc->parsed()) return bro::cli::cmd_mcmc(opts);
    if (optimize->parsed()) return bro::cli::cmd_optimize(opts);
    if (benchmark->parsed()) return bro::cli::cmd_benchmark(opts);
    if (sweep->parsed()) return bro::cli::cmd_sweep(opts);
    if (oracle->parsed()) return bro::cli::cmd_oracle(opts);
  } catch (const bro::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
