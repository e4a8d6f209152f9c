#include "config.hpp"

#include <fstream>

#include "bro/chain_io.hpp"

namespace bro::cli {

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON (" + path.string() + "): " + e.what());
  }
}

const json& require_section(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + "." + key + " is required");
  return j.at(key);
}

namespace {

double number_in_range(const json& v, const std::string& field, double lo, double hi) {
  if (!v.is_number()) throw ConfigError(field + " must be a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) {
    throw ConfigError(field + " = " + std::to_string(x) + " is outside [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
  return x;
}

long integer_in_range(const json& v, const std::string& field, long lo, long hi) {
  if (!v.is_number_integer()) throw ConfigError(field + " must be an integer");
  const long x = v.get<long>();
  if (!(x >= lo && x <= hi)) {
    throw ConfigError(field + " = " + std::to_string(x) + " is outside [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
  return x;
}

}  // namespace

double require_number(const json& j, const std::string& key, const std::string& where, double lo,
                      double hi) {
  if (!j.contains(key)) throw ConfigError(where + "." + key + " is required");
  return number_in_range(j.at(key), where + "." + key, lo, hi);
}

double optional_number(const json& j, const std::string& key, const std::string& where, double lo,
                       double hi, double fallback) {
  if (!j.contains(key)) return fallback;
  return number_in_range(j.at(key), where + "." + key, lo, hi);
}

long require_integer(const json& j, const std::string& key, const std::string& where, long lo,
                     long hi) {
  if (!j.contains(key)) throw ConfigError(where + "." + key + " is required");
  return integer_in_range(j.at(key), where + "." + key, lo, hi);
}

long optional_integer(const json& j, const std::string& key, const std::string& where, long lo,
                      long hi, long fallback) {
  if (!j.contains(key)) return fallback;
  return integer_in_range(j.at(key), where + "." + key, lo, hi);
}

std::string require_string(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError(where + "." + key + " must be a string");
  }
  return j.at(key).get<std::string>();
}

RiskSpec parse_risk(const json& j, const std::string& where) {
  const std::string rho = require_string(j, "rho", where);
  if (rho == "expectation") return RiskSpec::expectation();
  if (rho == "mean_variance") {
    return RiskSpec::mean_variance(require_number(j, "weight", where, 0.0, 1e9));
  }
  if (rho == "var") {
    return RiskSpec::value_at_risk(require_number(j, "alpha", where, 1e-9, 1.0 - 1e-9));
  }
  if (rho == "cvar") {
    return RiskSpec::cvar(require_number(j, "alpha", where, 1e-9, 1.0 - 1e-9));
  }
  throw ConfigError(where + ".rho: unknown risk function '" + rho + "'");
}

std::unique_ptr<SimulationModel> parse_model(const json& j, const std::string& where) {
  const std::string type = require_string(j, "type", where);
  if (type == "quadratic") {
    const double divisor = optional_number(j, "noise_scale_divisor", where, 1e-9, 1e12, 100.0);
    double lo = -5.0;
    double hi = 5.0;
    if (j.contains("box")) {
      const auto& box = j.at("box");
      if (!box.is_array() || box.size() != 2) throw ConfigError(where + ".box must be [lo, hi]");
      lo = box[0].get<double>();
      hi = box[1].get<double>();
      if (!(lo < hi)) throw ConfigError(where + ".box needs lo < hi");
    }
    return std::make_unique<QuadraticModel>(divisor, Box::interval(lo, hi));
  }
  if (type == "market") {
    MarketModel::Params p;
    p.k_c = optional_number(j, "k_c", where, 1e-9, 1e9, p.k_c);
    p.k_p = optional_number(j, "k_p", where, 1e-9, 1e9, p.k_p);
    p.customers = static_cast<int>(optional_integer(j, "customers", where, 1, 1000000, p.customers));
    p.revenue_weight = optional_number(j, "revenue_weight", where, 0.0, 1e9, p.revenue_weight);
    if (j.contains("price_box")) {
      const auto& box = j.at("price_box");
      if (!box.is_array() || box.size() != 2) throw ConfigError(where + ".price_box must be [lo, hi]");
      p.price_lo = box[0].get<double>();
      p.price_hi = box[1].get<double>();
      if (!(0.0 < p.price_lo && p.price_lo < p.price_hi)) {
        throw ConfigError(where + ".price_box needs 0 < lo < hi");
      }
    }
    return std::make_unique<MarketModel>(p);
  }
  throw ConfigError(where + ".type: unknown model '" + type + "'");
}

std::unique_ptr<PosteriorSampler> parse_posterior(const json& j, const std::string& where) {
  const std::string type = require_string(j, "type", where);
  if (type == "gaussian") {
    const auto& mean = require_section(j, "mean", where);
    const auto& std_ = require_section(j, "std", where);
    if (!mean.is_array() || !std_.is_array() || mean.size() != std_.size() || mean.empty()) {
      throw ConfigError(where + ": mean and std must be equal-length non-empty arrays");
    }
    Eigen::VectorXd mu(mean.size()), sigma(std_.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mu[static_cast<Eigen::Index>(i)] = mean[i].get<double>();
      sigma[static_cast<Eigen::Index>(i)] = std_[i].get<double>();
      if (!(sigma[static_cast<Eigen::Index>(i)] > 0.0)) {
        throw ConfigError(where + ".std[" + std::to_string(i) + "] must be positive");
      }
    }
    return std::make_unique<GaussianPosterior>(std::move(mu), std::move(sigma));
  }
  if (type == "dirac") {
    const auto& th = require_section(j, "theta", where);
    if (!th.is_array() || th.empty()) throw ConfigError(where + ".theta must be a non-empty array");
    Eigen::VectorXd theta(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) theta[static_cast<Eigen::Index>(i)] = th[i].get<double>();
    return std::make_unique<DiracPosterior>(std::move(theta));
  }
  if (type == "chain_files") {
    const auto& files = require_section(j, "files", where);
    if (!files.is_array() || files.empty()) {
      throw ConfigError(where + ".files must be a non-empty array of chain file paths");
    }
    std::vector<std::vector<double>> components;
    for (const auto& f : files) {
      const ChainFile chain = read_chain(f.get<std::string>());
      components.push_back(chain.states);
    }
    return std::make_unique<EmpiricalPosterior>(std::move(components));
  }
  throw ConfigError(where + ".type: unknown posterior '" + type + "'");
}

StepSchedule parse_step_schedule(const json& j, const std::string& where) {
  StepSchedule s;
  s.c = optional_number(j, "c", where, 1e-12, 1e9, s.c);
  s.t0 = optional_number(j, "t0", where, 1e-12, 1e12, s.t0);
  s.gamma = optional_number(j, "gamma", where, 0.0, 1.0, s.gamma);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return s;
}

BudgetSchedule parse_budget_schedule(const json& j, const std::string& where) {
  BudgetSchedule b;
  b.n0 = optional_number(j, "n0", where, 1.0, 1e9, b.n0);
  b.n_slope = optional_number(j, "n_slope", where, 0.0, 1e9, b.n_slope);
  b.m_divisor = optional_number(j, "m_divisor", where, 1.0, 1e9, b.m_divisor);
  b.k_batches = static_cast<int>(optional_integer(j, "k_batches", where, 1, 1000000, b.k_batches));
  try {
    b.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return b;
}

MCMCConfig parse_mcmc(const json& j, const std::string& where) {
  MCMCConfig cfg;
  cfg.proposal_std = optional_number(j, "proposal_std", where, 1e-12, 1e9, cfg.proposal_std);
  cfg.prior_lo = optional_number(j, "prior_lo", where, -1e12, 1e12, cfg.prior_lo);
  cfg.prior_hi = optional_number(j, "prior_hi", where, -1e12, 1e12, cfg.prior_hi);
  cfg.chain_length = optional_integer(j, "chain_length", where, 1, 100000000, cfg.chain_length);
  cfg.burn_in = optional_integer(j, "burn_in", where, 0, 100000000, cfg.burn_in);
  cfg.init = optional_number(j, "init", where, -1e12, 1e12, cfg.init);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return cfg;
}

}  // namespace bro::cli
