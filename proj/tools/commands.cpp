#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <vector>

#include "bro/chain_io.hpp"
#include "bro/csv.hpp"
#include "bro/estimators.hpp"
#include "bro/nelder_mead.hpp"
#include "bro/oracle.hpp"
#include "bro/saa.hpp"
#include "bro/sa.hpp"
#include "bro/stats.hpp"
#include "bro/wasserstein.hpp"
#include "config.hpp"

namespace bro::cli {

namespace {

namespace fs = std::filesystem;

void ensure_out_dir(const CommandOptions& opts) { fs::create_directories(opts.out); }

std::vector<double> read_value_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#' || line == "value") continue;
    values.push_back(std::stod(line));
  }
  if (values.empty()) throw ConfigError("data file has no values: " + path.string());
  return values;
}

void write_value_file(const fs::path& path, const std::vector<double>& values) {
  csv::Writer out(path);
  out.row({"value"});
  for (double v : values) out.row({csv::cell(v)});
}

Eigen::VectorXd parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array");
  Eigen::VectorXd x(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) x[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return x;
}

std::string risk_label(const RiskSpec& spec) {
  char buf[64];
  switch (spec.kind) {
    case RiskSpec::Kind::expectation:
      return "expectation";
    case RiskSpec::Kind::mean_variance:
      std::snprintf(buf, sizeof(buf), "mean_variance_%g", spec.weight);
      return buf;
    case RiskSpec::Kind::var:
      std::snprintf(buf, sizeof(buf), "var_%g", spec.alpha);
      return buf;
    case RiskSpec::Kind::cvar:
      std::snprintf(buf, sizeof(buf), "cvar_%g", spec.alpha);
      return buf;
  }
  return "?";
}

void write_trace_csv(const fs::path& path, const SATrace& trace, Eigen::Index dim) {
  csv::Writer out(path);
  out.comment("seed=" + std::to_string(trace.seed));
  if (trace.aborted) out.comment("aborted=" + trace.abort_message);
  std::vector<std::string> header{"t"};
  for (Eigen::Index d = 0; d < dim; ++d) header.push_back("x" + std::to_string(d));
  for (Eigen::Index d = 0; d < dim; ++d) header.push_back("y" + std::to_string(d));
  header.insert(header.end(), {"obj", "n_t", "m_t", "eps_t"});
  out.row(header);
  for (const SAIteration& it : trace.iterations) {
    std::vector<std::string> row{csv::cell(it.t)};
    for (Eigen::Index d = 0; d < dim; ++d) row.push_back(csv::cell(it.x[d]));
    for (Eigen::Index d = 0; d < dim; ++d) row.push_back(csv::cell(it.y[d]));
    row.push_back(csv::cell(it.objective));
    row.push_back(csv::cell(it.n));
    row.push_back(csv::cell(it.m));
    row.push_back(csv::cell(it.eps));
    out.row(row);
  }
  // closing row carries the final iterate
  std::vector<std::string> row{csv::cell(static_cast<long>(trace.iterations.size()))};
  for (Eigen::Index d = 0; d < dim; ++d) row.push_back(csv::cell(trace.final_x[d]));
  for (Eigen::Index d = 0; d < dim; ++d) row.push_back("nan");
  row.insert(row.end(), {"nan", "0", "0", "nan"});
  out.row(row);
}

struct RateBinding {
  std::string name;
  double p_obs = 10.0;
  std::function<double(double, double)> rate_fn;
};

RateBinding parse_rate_binding(const json& comp, const std::string& where, double k_c, double k_p) {
  RateBinding binding;
  binding.name = require_string(comp, "name", where);
  binding.p_obs = require_number(comp, "p_obs", where, 0.0, 1e12);
  const std::string rate = require_string(comp, "rate", where);
  if (rate == "lambda") {
    binding.rate_fn = [k_c](double p, double theta) { return rate_lambda(p, theta, k_c); };
  } else if (rate == "mu") {
    binding.rate_fn = [k_p](double p, double theta) { return rate_mu(p, theta, k_p); };
  } else {
    throw ConfigError(where + ".rate must be 'lambda' or 'mu'");
  }
  return binding;
}

}  // namespace

int cmd_mcmc(const CommandOptions& opts) {
  const json cfg = load_config(opts.config);
  ensure_out_dir(opts);

  const json& model_cfg = require_section(cfg, "model", "config");
  const double k_c = optional_number(model_cfg, "k_c", "config.model", 1e-9, 1e9, 40.0);
  const double k_p = optional_number(model_cfg, "k_p", "config.model", 1e-9, 1e9, 20.0);

  MCMCConfig mcmc = parse_mcmc(require_section(cfg, "mcmc", "config"), "config.mcmc");
  long subset = optional_integer(cfg, "diagnostic_subset", "config", 1, 100000000, 100000);
  if (opts.small_scale) {
    mcmc.chain_length = std::min(mcmc.chain_length, 100000L);
    mcmc.burn_in = std::min(mcmc.burn_in, 10000L);
    subset = std::min(subset, mcmc.chain_length / 10);
  }
  if (subset < 1) subset = 1;

  const json& components = require_section(cfg, "components", "config");
  if (!components.is_array() || components.empty()) {
    throw ConfigError("config.components must be a non-empty array");
  }

  const RngStream root(opts.seed);
  std::ofstream report(opts.out / "mcmc_report.txt");
  report << "mcmc report (seed=" << opts.seed << ", scale=" << (opts.small_scale ? "small" : "paper")
         << ")\n";

  for (std::size_t c = 0; c < components.size(); ++c) {
    const std::string where = "config.components[" + std::to_string(c) + "]";
    const RateBinding binding = parse_rate_binding(components[c], where, k_c, k_p);
    const RngStream comp_stream = root.child(c);

    std::vector<double> data;
    if (components[c].contains("data_file")) {
      data = read_value_file(components[c].at("data_file").get<std::string>());
    } else {
      const json& synth = require_section(cfg, "synthetic", "config");
      const auto true_theta = parse_point(require_section(synth, "true_theta", "config.synthetic"),
                                          "config.synthetic.true_theta");
      if (true_theta.size() <= static_cast<Eigen::Index>(c)) {
        throw ConfigError("config.synthetic.true_theta has too few components");
      }
      const long n_obs = require_integer(synth, "observations", "config.synthetic", 1, 100000000);
      const double rate = binding.rate_fn(binding.p_obs, true_theta[static_cast<Eigen::Index>(c)]);
      data = synthetic_interarrivals(rate, static_cast<int>(n_obs), comp_stream.child(0));
      write_value_file(opts.out / ("data_" + binding.name + ".csv"), data);
    }

    MCMCConfig comp_cfg = mcmc;
    comp_cfg.seed = comp_stream.child(1).key();
    const auto log_lik = [&](double theta) {
      return interarrival_log_likelihood(theta, data, binding.rate_fn, binding.p_obs);
    };
    const MCMCResult result = metropolis_hastings(comp_cfg, log_lik);

    std::string fingerprint = binding.name + "|" + std::to_string(comp_cfg.proposal_std) + "|" +
                              std::to_string(comp_cfg.prior_lo) + "|" +
                              std::to_string(comp_cfg.prior_hi) + "|" +
                              std::to_string(comp_cfg.chain_length) + "|" +
                              std::to_string(comp_cfg.burn_in) + "|" +
                              std::to_string(comp_cfg.init) + "|" + std::to_string(binding.p_obs);
    for (double v : data) fingerprint += "|" + csv::cell(v);

    ChainFile chain;
    chain.chain_id = binding.name;
    chain.config_hash = fingerprint_hash(fingerprint);
    chain.seed = comp_cfg.seed;
    chain.states = result.states;
    write_chain(opts.out / ("chain_" + binding.name + ".csv"), chain);

    const std::size_t usable_subset =
        std::min<std::size_t>(static_cast<std::size_t>(subset), result.states.size() / 2);
    const ChainConvergenceReport diag =
        chain_convergence_report(result.states, usable_subset, comp_stream.child(2).key());
    {
      csv::Writer out(opts.out / ("convergence_" + binding.name + ".csv"));
      out.row({"kind", "block_i", "block_j", "w1"});
      for (const SubsetDistance& d : diag.consecutive) {
        out.row({"consecutive", csv::cell(d.first), csv::cell(d.second), csv::cell(d.distance)});
      }
      for (const SubsetDistance& d : diag.arbitrary) {
        out.row({"arbitrary", csv::cell(d.first), csv::cell(d.second), csv::cell(d.distance)});
      }
    }

    RunningStats stats;
    for (double s : result.states) stats.add(s);
    report << binding.name << ": states=" << result.states.size()
           << " acceptance=" << csv::cell(result.acceptance_rate())
           << " out_of_bounds=" << result.out_of_bounds << " mean=" << csv::cell(stats.mean())
           << " std=" << csv::cell(stats.stddev())
           << " w1_consecutive=" << csv::cell(diag.mean_consecutive)
           << " w1_arbitrary=" << csv::cell(diag.mean_arbitrary)
           << " converged=" << (diag.converged ? "yes" : "no") << "\n";
  }
  return 0;
}

int cmd_optimize(const CommandOptions& opts) {
  const json cfg = load_config(opts.config);
  ensure_out_dir(opts);

  const auto model = parse_model(require_section(cfg, "model", "config"), "config.model");
  const auto posterior =
      parse_posterior(require_section(cfg, "posterior", "config"), "config.posterior");
  const RiskSpec spec = parse_risk(require_section(cfg, "risk", "config"), "config.risk");

  const json& sa_cfg = require_section(cfg, "sa", "config");
  const StepSchedule step = parse_step_schedule(
      sa_cfg.contains("step") ? sa_cfg.at("step") : json::object(), "config.sa.step");
  const BudgetSchedule budget = parse_budget_schedule(
      sa_cfg.contains("budget") ? sa_cfg.at("budget") : json::object(), "config.sa.budget");
  long iterations = require_integer(sa_cfg, "iterations", "config.sa", 1, 100000000);
  const Eigen::VectorXd x0 = parse_point(require_section(sa_cfg, "x0", "config.sa"), "config.sa.x0");
  if (!model->decision_box().contains(x0)) {
    throw ConfigError("config.sa.x0 must lie inside the model decision box");
  }

  long replications = optional_integer(cfg, "replications", "config", 1, 1000000, 50);

  const json eval_cfg = cfg.contains("evaluate") ? cfg.at("evaluate") : json::object();
  long eval_n = optional_integer(eval_cfg, "n", "config.evaluate", 1, 100000000, 10000);
  long eval_m = optional_integer(eval_cfg, "m", "config.evaluate", 1, 100000000, 1000);
  long true_samples = optional_integer(eval_cfg, "true_samples", "config.evaluate", 1, 100000000, 100000);
  std::optional<Eigen::VectorXd> true_theta;
  if (eval_cfg.contains("true_theta")) {
    true_theta = parse_point(eval_cfg.at("true_theta"), "config.evaluate.true_theta");
  }

  if (opts.small_scale) {
    replications = std::min(replications, 5L);
    iterations = std::min(iterations, 200L);
    eval_n = std::min(eval_n, 2000L);
    eval_m = std::min(eval_m, 100L);
    true_samples = std::min(true_samples, 20000L);
  }

  const RngStream root(opts.seed);
  const RngStream eval_stream = root.child(1000000);       // shared across reps: CRN
  const RngStream true_eval_stream = root.child(1000001);

  csv::Writer summary(opts.out / "summary.csv");
  {
    std::vector<std::string> header{"rep"};
    for (Eigen::Index d = 0; d < model->decision_dim(); ++d) header.push_back("x" + std::to_string(d));
    header.insert(header.end(), {"objective", "objective_se"});
    if (true_theta) header.insert(header.end(), {"true_value", "true_se"});
    summary.row(header);
  }

  std::vector<Eigen::VectorXd> finals;
  RunningStats obj_stats;
  RunningStats true_stats;
  for (long r = 0; r < replications; ++r) {
    const SATrace trace =
        sa_run(*model, *posterior, spec, step, budget, x0, iterations, root.child(r));
    write_trace_csv(opts.out / ("trace_rep" + std::to_string(r) + ".csv"), trace,
                    model->decision_dim());
    finals.push_back(trace.final_x);

    const OracleValue value = brute_force_objective(*model, *posterior, spec, trace.final_x,
                                                    static_cast<int>(eval_n),
                                                    static_cast<int>(eval_m), eval_stream);
    obj_stats.add(value.value);
    std::vector<std::string> row{csv::cell(r)};
    for (Eigen::Index d = 0; d < model->decision_dim(); ++d) row.push_back(csv::cell(trace.final_x[d]));
    row.insert(row.end(), {csv::cell(value.value), csv::cell(value.std_err)});
    if (true_theta) {
      const DiracPosterior truth(*true_theta);
      const OracleValue tv = brute_force_objective(*model, truth, RiskSpec::expectation(),
                                                   trace.final_x, 100,
                                                   static_cast<int>(true_samples / 100 + 1),
                                                   true_eval_stream);
      true_stats.add(tv.value);
      row.insert(row.end(), {csv::cell(tv.value), csv::cell(tv.std_err)});
    }
    summary.row(row);
  }

  RunningStats x_stats;
  for (const auto& x : finals) x_stats.add(x[0]);
  std::ofstream report(opts.out / "optimize_report.txt");
  report << "model=" << require_string(require_section(cfg, "model", "config"), "type", "config.model")
         << " risk=" << risk_label(spec) << " reps=" << replications << " T=" << iterations << "\n";
  report << "final_x mean=" << csv::cell(x_stats.mean()) << " std=" << csv::cell(x_stats.stddev())
         << "\n";
  report << "objective mean=" << csv::cell(obj_stats.mean()) << "\n";
  if (true_theta) report << "true performance mean=" << csv::cell(true_stats.mean()) << "\n";
  return 0;
}

int cmd_benchmark(const CommandOptions& opts) {
  const json cfg = load_config(opts.config);
  ensure_out_dir(opts);

  const auto model = parse_model(require_section(cfg, "model", "config"), "config.model");
  const auto posterior_cfg = require_section(cfg, "posterior", "config");
  const auto posterior = parse_posterior(posterior_cfg, "config.posterior");
  const RiskSpec spec = parse_risk(require_section(cfg, "risk", "config"), "config.risk");

  const auto* gaussian = dynamic_cast<const GaussianPosterior*>(posterior.get());
  if (gaussian == nullptr || gaussian->dim() != 2) {
    throw ConfigError("config.posterior: benchmark needs a 2-component gaussian posterior");
  }
  QuadraticPosteriorParams params;
  params.mu1 = gaussian->mean()[0];
  params.mu2 = gaussian->mean()[1];
  params.sigma1 = gaussian->stddev()[0];
  params.sigma2 = gaussian->stddev()[1];
  const Box& box = model->decision_box();
  const ScalarOptimum opt = quadratic_optimum(spec, params, box.lo[0], box.hi[0]);

  const json& budget_cfg = require_section(cfg, "budget", "config");
  const int n = static_cast<int>(require_integer(budget_cfg, "n", "config.budget", 1, 100000000));
  const int m = static_cast<int>(require_integer(budget_cfg, "m", "config.budget", 1, 100000000));

  const json& evals_cfg = require_section(cfg, "evaluations", "config");
  if (!evals_cfg.is_array() || evals_cfg.empty()) {
    throw ConfigError("config.evaluations must be a non-empty array of budgets");
  }
  std::vector<long> budgets;
  for (const auto& e : evals_cfg) {
    budgets.push_back(e.get<long>());
    if (budgets.back() < 2) throw ConfigError("config.evaluations entries must be >= 2");
  }

  struct Algorithm {
    std::string name;
    bool saa;
  };
  std::vector<Algorithm> algorithms;
  const json& algos_cfg = require_section(cfg, "algorithms", "config");
  for (std::size_t i = 0; i < algos_cfg.size(); ++i) {
    const std::string where = "config.algorithms[" + std::to_string(i) + "]";
    const std::string name = require_string(algos_cfg[i], "name", where);
    if (name != "sa" && name != "nelder_mead") {
      throw ConfigError(where + ".name: unknown algorithm '" + name + "'");
    }
    const std::string mode = require_string(algos_cfg[i], "mode", where);
    if (mode != "stochastic" && mode != "saa") {
      throw ConfigError(where + ".mode must be 'stochastic' or 'saa'");
    }
    algorithms.push_back({name, mode == "saa"});
  }
  if (algorithms.empty()) throw ConfigError("config.algorithms must be non-empty");

  long replications = optional_integer(cfg, "replications", "config", 1, 1000000, 50);
  if (opts.small_scale) replications = std::min(replications, 10L);

  const StepSchedule sa_step = parse_step_schedule(
      cfg.contains("sa_step") ? cfg.at("sa_step") : json::object(), "config.sa_step");
  const Eigen::VectorXd x0 = parse_point(require_section(cfg, "x0", "config"), "config.x0");
  if (!box.contains(x0)) throw ConfigError("config.x0 must lie inside the model box");

  BudgetSchedule fixed_budget;
  fixed_budget.n0 = n;
  fixed_budget.n_slope = 0.0;
  fixed_budget.m_divisor = static_cast<double>(n) / static_cast<double>(m);
  fixed_budget.k_batches = 1;

  NelderMeadOptions nm_options;
  nm_options.box = box;
  nm_options.initial_edge =
      optional_number(cfg, "nm_initial_edge_fraction", "config", 0.0, 1.0, 0.05) *
      (box.hi[0] - box.lo[0]);

  // Optional reference columns copied through to the report.
  std::map<std::string, std::map<long, double>> reference;
  if (cfg.contains("external_reference")) {
    for (const auto& [label, table] : cfg.at("external_reference").items()) {
      for (const auto& [budget_key, value] : table.items()) {
        reference[label][std::stol(budget_key)] = value.get<double>();
      }
    }
  }

  const RngStream root(opts.seed);
  csv::Writer out(opts.out / "benchmark.csv");
  {
    std::vector<std::string> header{"algorithm", "mode", "evaluations", "mean_gap", "std_gap",
                                    "std_err"};
    for (const auto& [label, _] : reference) header.push_back("ref_" + label);
    out.row(header);
  }

  const auto gap_of = [&](const Eigen::VectorXd& x) {
    return quadratic_closed_form(x[0], spec, params).value - opt.value;
  };

  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    const Algorithm& algo = algorithms[a];
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      const long budget = budgets[b];
      RunningStats gaps;
      for (long r = 0; r < replications; ++r) {
        const RngStream run_stream = root.child(a).child(b).child(r);
        Eigen::VectorXd final_x;
        if (algo.name == "sa" && !algo.saa) {
          final_x = sa_run(*model, *posterior, spec, sa_step, fixed_budget, x0, budget, run_stream)
                        .final_x;
        } else if (algo.name == "sa") {
          const FrozenProblem frozen =
              saa_freeze(*model, *posterior, spec, n, m, run_stream.child(0));
          Eigen::VectorXd x = x0;
          for (long t = 0; t < budget; ++t) {
            const GradientEstimate g = frozen.gradient(x);
            x = project(x - sa_step.at(t) * g.gradient, box);
          }
          final_x = x;
        } else if (!algo.saa) {
          long counter = 0;
          const auto objective = [&](const Eigen::VectorXd& x) {
            const NestedBatch batch =
                simulate_batch(*model, *posterior, x, n, m,
                               run_stream.child(1).child(static_cast<std::uint64_t>(counter++)),
                               InnerStorage::aggregated);
            return batch_objective(batch, spec);
          };
          final_x = nelder_mead(objective, x0, budget, nm_options).x;
        } else {
          const FrozenProblem frozen =
              saa_freeze(*model, *posterior, spec, n, m, run_stream.child(0));
          const auto objective = [&](const Eigen::VectorXd& x) { return frozen.objective(x); };
          final_x = nelder_mead(objective, x0, budget, nm_options).x;
        }
        gaps.add(gap_of(final_x));
      }
      std::vector<std::string> row{algo.name, algo.saa ? "saa" : "stochastic", csv::cell(budget),
                                   csv::cell(gaps.mean()), csv::cell(gaps.stddev()),
                                   csv::cell(gaps.std_error())};
      for (const auto& [label, table] : reference) {
        const auto it = table.find(budget);
        row.push_back(it == table.end() ? "" : csv::cell(it->second));
      }
      out.row(row);
    }
  }

  std::ofstream report(opts.out / "benchmark_report.txt");
  report << "risk=" << risk_label(spec) << " x_star=" << csv::cell(opt.x)
         << " value=" << csv::cell(opt.value) << " reps=" << replications << " (n=" << n
         << ", m=" << m << ")\n";
  report << "columns ref_* are external reference values copied from the comparison config\n";
  return 0;
}

int cmd_sweep(const CommandOptions& opts) {
  const json cfg = load_config(opts.config);
  ensure_out_dir(opts);

  const auto model_cfg = require_section(cfg, "model", "config");
  const auto model = parse_model(model_cfg, "config.model");
  const auto* market = dynamic_cast<const MarketModel*>(model.get());
  if (market == nullptr) throw ConfigError("config.model: sweep requires the market model");

  const auto true_theta = parse_point(require_section(cfg, "true_theta", "config"), "config.true_theta");
  if (true_theta.size() != 2) throw ConfigError("config.true_theta must have two components");
  const long n_obs = require_integer(cfg, "observations", "config", 1, 100000000);
  const double p_obs = require_number(cfg, "p_obs", "config", 0.0, 1e12);
  long datasets = require_integer(cfg, "datasets", "config", 1, 1000000);

  MCMCConfig mcmc = parse_mcmc(require_section(cfg, "mcmc", "config"), "config.mcmc");

  const json& sa_cfg = require_section(cfg, "sa", "config");
  const StepSchedule step = parse_step_schedule(
      sa_cfg.contains("step") ? sa_cfg.at("step") : json::object(), "config.sa.step");
  const BudgetSchedule budget = parse_budget_schedule(
      sa_cfg.contains("budget") ? sa_cfg.at("budget") : json::object(), "config.sa.budget");
  long iterations = require_integer(sa_cfg, "iterations", "config.sa", 1, 100000000);
  const Eigen::VectorXd x0 = parse_point(require_section(sa_cfg, "x0", "config.sa"), "config.sa.x0");

  const json& mle_cfg = require_section(cfg, "mle", "config");
  const double mle_grid = require_number(mle_cfg, "grid_step", "config.mle", 1e-9, 1e9);
  const long mle_m = optional_integer(mle_cfg, "m", "config.mle", 1, 100000000, 10000);

  const json eval_cfg = cfg.contains("evaluate") ? cfg.at("evaluate") : json::object();
  long eval_samples = optional_integer(eval_cfg, "samples", "config.evaluate", 100, 100000000, 10000);

  const json& hist_cfg = require_section(cfg, "histogram", "config");
  const double hist_lo = require_number(hist_cfg, "lo", "config.histogram", -1e12, 1e12);
  const double hist_hi = require_number(hist_cfg, "hi", "config.histogram", -1e12, 1e12);
  const long hist_bins = require_integer(hist_cfg, "bins", "config.histogram", 1, 100000);
  if (!(hist_lo < hist_hi)) throw ConfigError("config.histogram needs lo < hi");

  struct Objective {
    bool mle = false;
    RiskSpec spec;
    std::string label;
  };
  std::vector<Objective> objectives;
  const json& objs_cfg = require_section(cfg, "objectives", "config");
  for (std::size_t i = 0; i < objs_cfg.size(); ++i) {
    const std::string where = "config.objectives[" + std::to_string(i) + "]";
    const std::string rho = require_string(objs_cfg[i], "rho", where);
    Objective o;
    if (rho == "mle") {
      o.mle = true;
      o.label = "mle";
    } else {
      o.spec = parse_risk(objs_cfg[i], where);
      o.label = risk_label(o.spec);
    }
    objectives.push_back(o);
  }
  if (objectives.empty()) throw ConfigError("config.objectives must be non-empty");

  if (opts.small_scale) {
    datasets = std::min(datasets, 5L);
    iterations = std::min(iterations, 200L);
    mcmc.chain_length = std::min(mcmc.chain_length, 100000L);
    mcmc.burn_in = std::min(mcmc.burn_in, 10000L);
    eval_samples = std::min(eval_samples, 10000L);
  }

  const RngStream root(opts.seed);
  const RngStream eval_stream = root.child(1000000);  // CRN across all evaluations
  const DiracPosterior truth(true_theta);

  std::vector<std::vector<double>> solutions(objectives.size());
  std::vector<std::vector<double>> performance(objectives.size());

  for (long d = 0; d < datasets; ++d) {
    const RngStream data_stream = root.child(0).child(d);
    const double lambda_true = rate_lambda(p_obs, true_theta[0], market->params().k_c);
    const double mu_true = rate_mu(p_obs, true_theta[1], market->params().k_p);
    const std::vector<double> data_c =
        synthetic_interarrivals(lambda_true, static_cast<int>(n_obs), data_stream.child(0));
    const std::vector<double> data_p =
        synthetic_interarrivals(mu_true, static_cast<int>(n_obs), data_stream.child(1));

    MCMCConfig cfg_c = mcmc;
    cfg_c.seed = data_stream.child(2).key();
    MCMCConfig cfg_p = mcmc;
    cfg_p.seed = data_stream.child(3).key();
    const double k_c = market->params().k_c;
    const double k_p = market->params().k_p;
    const MCMCResult chain_c = metropolis_hastings(cfg_c, [&](double theta) {
      return interarrival_log_likelihood(theta, data_c,
                                         [k_c](double p, double t) { return rate_lambda(p, t, k_c); },
                                         p_obs);
    });
    const MCMCResult chain_p = metropolis_hastings(cfg_p, [&](double theta) {
      return interarrival_log_likelihood(theta, data_p,
                                         [k_p](double p, double t) { return rate_mu(p, t, k_p); },
                                         p_obs);
    });
    const EmpiricalPosterior posterior({chain_c.states, chain_p.states});

    for (std::size_t o = 0; o < objectives.size(); ++o) {
      double price = 0.0;
      if (objectives[o].mle) {
        price = mle_baseline(*market, data_c, data_p, p_obs, mle_grid, 1,
                             static_cast<int>(mle_m), data_stream.child(1000))
                    .price;
      } else {
        price = sa_run(*model, posterior, objectives[o].spec, step, budget, x0, iterations,
                       data_stream.child(100 + o))
                    .final_x[0];
      }
      solutions[o].push_back(price);
      const OracleValue perf = brute_force_objective(
          *model, truth, RiskSpec::expectation(), Eigen::VectorXd::Constant(1, price), 100,
          static_cast<int>(eval_samples / 100 + 1), eval_stream);
      performance[o].push_back(perf.value);
    }
  }

  {
    csv::Writer out(opts.out / "solutions.csv");
    std::vector<std::string> header{"dataset"};
    for (const auto& o : objectives) header.push_back(o.label);
    out.row(header);
    for (long d = 0; d < datasets; ++d) {
      std::vector<std::string> row{csv::cell(d)};
      for (std::size_t o = 0; o < objectives.size(); ++o) {
        row.push_back(csv::cell(solutions[o][static_cast<std::size_t>(d)]));
      }
      out.row(row);
    }
  }
  {
    csv::Writer out(opts.out / "performance.csv");
    std::vector<std::string> header{"dataset"};
    for (const auto& o : objectives) header.push_back(o.label);
    out.row(header);
    for (long d = 0; d < datasets; ++d) {
      std::vector<std::string> row{csv::cell(d)};
      for (std::size_t o = 0; o < objectives.size(); ++o) {
        row.push_back(csv::cell(performance[o][static_cast<std::size_t>(d)]));
      }
      out.row(row);
    }
  }

  const auto write_histogram = [&](const std::string& tag, const std::vector<double>& values,
                                   std::size_t o) {
    csv::Writer out(opts.out / ("hist_" + tag + "_" + objectives[o].label + ".csv"));
    out.row({"bin_lo", "bin_hi", "count"});
    const double width = (hist_hi - hist_lo) / static_cast<double>(hist_bins);
    std::vector<long> counts(static_cast<std::size_t>(hist_bins), 0);
    for (double v : values) {
      // values beyond the range land in the edge bins
      long bin = static_cast<long>(std::floor((v - hist_lo) / width));
      bin = std::clamp(bin, 0L, hist_bins - 1);
      ++counts[static_cast<std::size_t>(bin)];
    }
    for (long b = 0; b < hist_bins; ++b) {
      out.row({csv::cell(hist_lo + width * static_cast<double>(b)),
               csv::cell(hist_lo + width * static_cast<double>(b + 1)),
               csv::cell(counts[static_cast<std::size_t>(b)])});
    }
  };
  for (std::size_t o = 0; o < objectives.size(); ++o) {
    write_histogram("solutions", solutions[o], o);
    write_histogram("performance", performance[o], o);
  }

  std::ofstream report(opts.out / "sweep_report.txt");
  report << "datasets=" << datasets << " objectives=" << objectives.size() << "\n";
  for (std::size_t o = 0; o < objectives.size(); ++o) {
    report << objectives[o].label << ": solution mean=" << csv::cell(mean_of(solutions[o]))
           << " std=" << csv::cell(stddev_of(solutions[o]))
           << " performance mean=" << csv::cell(mean_of(performance[o])) << "\n";
  }
  return 0;
}

int cmd_oracle(const CommandOptions& opts) {
  const json cfg = load_config(opts.config);
  ensure_out_dir(opts);

  const std::string task = require_string(cfg, "task", "config");
  const RiskSpec spec = parse_risk(require_section(cfg, "risk", "config"), "config.risk");

  if (task == "closed_form" || task == "optimum") {
    const json& pp = require_section(cfg, "posterior_params", "config");
    QuadraticPosteriorParams params;
    params.mu1 = require_number(pp, "mu1", "config.posterior_params", -1e12, 1e12);
    params.mu2 = require_number(pp, "mu2", "config.posterior_params", -1e12, 1e12);
    params.sigma1 = require_number(pp, "sigma1", "config.posterior_params", 0.0, 1e12);
    params.sigma2 = require_number(pp, "sigma2", "config.posterior_params", 0.0, 1e12);
    const double lo = optional_number(cfg, "lo", "config", -1e12, 1e12, -5.0);
    const double hi = optional_number(cfg, "hi", "config", -1e12, 1e12, 5.0);

    csv::Writer out(opts.out / "oracle.csv");
    if (task == "optimum") {
      const ScalarOptimum opt = quadratic_optimum(spec, params, lo, hi);
      out.row({"x_star", "value"});
      out.row({csv::cell(opt.x), csv::cell(opt.value)});
    } else {
      const json& xs = require_section(cfg, "x", "config");
      out.row({"x", "value", "gradient", "gradient_one_sided"});
      for (const auto& xv : xs) {
        const ClosedFormResult r = quadratic_closed_form(xv.get<double>(), spec, params);
        out.row({csv::cell(xv.get<double>()), csv::cell(r.value), csv::cell(r.gradient),
                 r.gradient_one_sided ? "1" : "0"});
      }
    }
    return 0;
  }

  if (task == "brute_force" || task == "grid_search") {
    const auto model = parse_model(require_section(cfg, "model", "config"), "config.model");
    const auto posterior =
        parse_posterior(require_section(cfg, "posterior", "config"), "config.posterior");
    long n = require_integer(cfg, "n", "config", 1, 100000000);
    long m = require_integer(cfg, "m", "config", 1, 100000000);
    if (opts.small_scale) {
      n = std::min(n, 2000L);
      m = std::min(m, 100L);
    }
    const RngStream stream(opts.seed);

    if (task == "grid_search") {
      const double grid_step = require_number(cfg, "grid_step", "config", 1e-12, 1e12);
      std::optional<std::pair<double, double>> interval;
      if (cfg.contains("interval")) {
        const auto& iv = cfg.at("interval");
        if (!iv.is_array() || iv.size() != 2) throw ConfigError("config.interval must be [lo, hi]");
        interval = std::make_pair(iv[0].get<double>(), iv[1].get<double>());
      }
      const ScalarOptimum opt = grid_search(*model, *posterior, spec, grid_step,
                                            static_cast<int>(n), static_cast<int>(m), stream,
                                            interval);
      csv::Writer out(opts.out / "oracle.csv");
      out.row({"x_star", "value"});
      out.row({csv::cell(opt.x), csv::cell(opt.value)});
      return 0;
    }

    const json& xs = require_section(cfg, "x", "config");
    const bool use_cache = cfg.contains("cache") && cfg.at("cache").get<bool>();
    const std::string model_name = require_string(require_section(cfg, "model", "config"), "type",
                                                  "config.model");
    OracleCache cache(opts.out / "oracle_cache.csv");
    csv::Writer out(opts.out / "oracle.csv");
    out.row({"x", "value", "std_err"});
    for (const auto& xv : xs) {
      const double x = xv.get<double>();
      const std::string key = OracleCache::key(model_name, spec, x, static_cast<int>(n),
                                               static_cast<int>(m), opts.seed);
      OracleValue value;
      const auto hit = use_cache ? cache.lookup(key) : std::nullopt;
      if (hit) {
        value = *hit;
      } else {
        value = brute_force_objective(*model, *posterior, spec, Eigen::VectorXd::Constant(1, x),
                                      static_cast<int>(n), static_cast<int>(m), stream);
        if (use_cache) cache.store(key, value);
      }
      out.row({csv::cell(x), csv::cell(value.value), csv::cell(value.std_err)});
    }
    if (use_cache) cache.save();
    return 0;
  }

  throw ConfigError("config.task: unknown task '" + task + "'");
}

}  // namespace bro::cli
