#include "bro/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "bro/stats.hpp"

namespace bro {

namespace {

// The oracle keeps its own risk-functional evaluation so comparisons against
// the estimator module cross-check two separately written routes.
std::size_t quantile_rank(double alpha, std::size_t n) {
  const auto rank = static_cast<long>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
  return static_cast<std::size_t>(std::clamp(rank, 1L, static_cast<long>(n)));
}

double risk_of_values(std::vector<double> values, const RiskSpec& spec) {
  switch (spec.kind) {
    case RiskSpec::Kind::expectation:
      return mean_of(values);
    case RiskSpec::Kind::mean_variance:
      return mean_of(values) + spec.weight * variance_of(values);
    case RiskSpec::Kind::var: {
      std::sort(values.begin(), values.end());
      return values[quantile_rank(spec.alpha, values.size()) - 1];
    }
    case RiskSpec::Kind::cvar: {
      std::sort(values.begin(), values.end());
      const double v = values[quantile_rank(spec.alpha, values.size()) - 1];
      double sum = 0.0;
      for (double h : values) {
        if (h >= v) sum += h;
      }
      return sum / (static_cast<double>(values.size()) * (1.0 - spec.alpha));
    }
  }
  throw std::logic_error("unhandled risk kind");
}

struct SigmaH {
  double value = 0.0;
  double derivative = 0.0;
  bool one_sided = false;
};

SigmaH sigma_h(double x, const QuadraticPosteriorParams& post) {
  const double s1 = post.sigma1 * post.sigma1;
  const double s2 = post.sigma2 * post.sigma2;
  SigmaH out;
  const double var = x * x * s1 + x * x * x * x * s2;
  out.value = std::sqrt(var);
  if (out.value > 0.0) {
    out.derivative = (x * s1 + 2.0 * x * x * x * s2) / out.value;
  } else {
    // sigma_H(x) = |x| sqrt(s1 + x^2 s2) has a kink at 0; report the
    // right-sided derivative and flag it.
    out.derivative = std::sqrt(s1);
    out.one_sided = (s1 > 0.0 || s2 > 0.0);
  }
  return out;
}

}  // namespace

ClosedFormResult quadratic_closed_form(double x, const RiskSpec& spec,
                                       const QuadraticPosteriorParams& post) {
  spec.validate();
  const double mu = x * post.mu1 + x * x * post.mu2;
  const double dmu = post.mu1 + 2.0 * x * post.mu2;
  ClosedFormResult out;
  switch (spec.kind) {
    case RiskSpec::Kind::expectation:
      out.value = mu;
      out.gradient = dmu;
      return out;
    case RiskSpec::Kind::mean_variance: {
      const double s1 = post.sigma1 * post.sigma1;
      const double s2 = post.sigma2 * post.sigma2;
      out.value = mu + spec.weight * (x * x * s1 + x * x * x * x * s2);
      out.gradient = dmu + spec.weight * (2.0 * x * s1 + 4.0 * x * x * x * s2);
      return out;
    }
    case RiskSpec::Kind::var: {
      const SigmaH s = sigma_h(x, post);
      const double z = normal_quantile(spec.alpha);
      out.value = mu + z * s.value;
      out.gradient = dmu + z * s.derivative;
      out.gradient_one_sided = s.one_sided;
      return out;
    }
    case RiskSpec::Kind::cvar: {
      const SigmaH s = sigma_h(x, post);
      const double z = normal_quantile(spec.alpha);
      const double tail_factor = normal_pdf(z) / (1.0 - spec.alpha);
      out.value = mu + tail_factor * s.value;
      out.gradient = dmu + tail_factor * s.derivative;
      out.gradient_one_sided = s.one_sided;
      return out;
    }
  }
  throw std::logic_error("unhandled risk kind");
}

ScalarOptimum quadratic_optimum(const RiskSpec& spec, const QuadraticPosteriorParams& post,
                                double lo, double hi, double xtol) {
  if (!(lo < hi)) throw std::invalid_argument("optimum search needs lo < hi");
  const auto f = [&](double x) { return quadratic_closed_form(x, spec, post).value; };

  // Coarse scan to bracket the minimum, then golden section.
  constexpr int kScan = 512;
  double best_x = lo;
  double best_v = f(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / kScan;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double width = (hi - lo) / kScan;
  double a = std::max(lo, best_x - width);
  double b = std::min(hi, best_x + width);

  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (a + b);
  return ScalarOptimum{x, f(x)};
}

OracleValue brute_force_objective(const SimulationModel& model, const PosteriorSampler& posterior,
                                  const RiskSpec& spec, const Eigen::VectorXd& x, int n, int m,
                                  RngStream stream) {
  spec.validate();
  if (n < 1 || m < 1) throw std::invalid_argument("oracle budgets need n >= 1 and m >= 1");
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const RngStream si = stream.child(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd theta = posterior.sample(si.child(0));
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      sum += model.simulate(x, theta, si.child(1 + static_cast<std::uint64_t>(j))).value;
    }
    values[static_cast<std::size_t>(i)] = sum / static_cast<double>(m);
  }

  OracleValue out;
  out.value = risk_of_values(values, spec);

  const std::size_t blocks = std::min<std::size_t>(20, values.size());
  const std::size_t base = values.size() / blocks;
  RunningStats block_stats;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t begin = b * base;
    const std::size_t end = (b + 1 == blocks) ? values.size() : begin + base;
    block_stats.add(risk_of_values({values.begin() + static_cast<std::ptrdiff_t>(begin),
                                    values.begin() + static_cast<std::ptrdiff_t>(end)},
                                   spec));
  }
  out.std_err = block_stats.std_error();
  return out;
}

ScalarOptimum grid_search(const SimulationModel& model, const PosteriorSampler& posterior,
                          const RiskSpec& spec, double grid_step, int n, int m, RngStream stream,
                          std::optional<std::pair<double, double>> interval) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (model.decision_dim() != 1) throw std::invalid_argument("grid search covers scalar decisions");
  const double lo = interval ? interval->first : model.decision_box().lo[0];
  const double hi = interval ? interval->second : model.decision_box().hi[0];

  ScalarOptimum best;
  best.value = std::numeric_limits<double>::infinity();
  const auto points = static_cast<long>(std::floor((hi - lo) / grid_step + 1e-9)) + 1;
  for (long k = 0; k < points; ++k) {
    const double x = lo + grid_step * static_cast<double>(k);
    const OracleValue v = brute_force_objective(model, posterior, spec,
                                                Eigen::VectorXd::Constant(1, x), n, m, stream);
    if (v.value < best.value) {
      best.value = v.value;
      best.x = x;
    }
  }
  return best;
}

double exponential_rate_mle(const std::vector<double>& data) {
  if (data.empty()) throw std::domain_error("rate MLE needs data");
  const double mean = mean_of(data);
  if (!(mean > 0.0)) throw std::domain_error("rate MLE needs positive interarrival times");
  return 1.0 / mean;
}

double invert_rate(const std::function<double(double, double)>& rate_fn, double p_obs,
                   double target_rate, double theta_lo, double theta_hi) {
  double f_lo = rate_fn(p_obs, theta_lo) - target_rate;
  double f_hi = rate_fn(p_obs, theta_hi) - target_rate;
  if (f_lo == 0.0) return theta_lo;
  if (f_hi == 0.0) return theta_hi;
  if (f_lo * f_hi > 0.0) {
    // Target outside the attainable range: boundary solution.
    return std::abs(f_lo) < std::abs(f_hi) ? theta_lo : theta_hi;
  }
  double lo = theta_lo;
  double hi = theta_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = rate_fn(p_obs, mid) - target_rate;
    if (f_mid == 0.0) return mid;
    if (f_lo * f_mid < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

MleBaseline mle_baseline(const MarketModel& model, const std::vector<double>& data_customers,
                         const std::vector<double>& data_providers, double p_obs,
                         double grid_step, int n, int m, RngStream stream) {
  const double lambda_hat = exponential_rate_mle(data_customers);
  const double mu_hat = exponential_rate_mle(data_providers);
  const double k_c = model.params().k_c;
  const double k_p = model.params().k_p;

  MleBaseline out;
  out.theta_c = invert_rate([&](double p, double t) { return rate_lambda(p, t, k_c); }, p_obs,
                            lambda_hat, 1e-8, 10.0);
  out.theta_p = invert_rate([&](double p, double t) { return rate_mu(p, t, k_p); }, p_obs, mu_hat,
                            1e-8, 10.0);

  Eigen::VectorXd theta(2);
  theta << out.theta_c, out.theta_p;
  const DiracPosterior plug_in(theta);
  const ScalarOptimum opt =
      grid_search(model, plug_in, RiskSpec::expectation(), grid_step, n, m, stream);
  out.price = opt.x;
  out.value = opt.value;
  return out;
}

OracleCache::OracleCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(file_);
  if (!in) return;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto c1 = line.rfind(',');
    if (c1 == std::string::npos) continue;
    const auto c0 = line.rfind(',', c1 - 1);
    if (c0 == std::string::npos) continue;
    OracleValue v;
    v.value = std::stod(line.substr(c0 + 1, c1 - c0 - 1));
    v.std_err = std::stod(line.substr(c1 + 1));
    entries_[line.substr(0, c0)] = v;
  }
}

std::string OracleCache::key(const std::string& model_name, const RiskSpec& spec, double x, int n,
                             int m, std::uint64_t seed) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%s|%s|a=%.17g|w=%.17g|x=%.17g|n=%d|m=%d|seed=%llu",
                model_name.c_str(), spec.name().c_str(), spec.alpha, spec.weight, x, n, m,
                static_cast<unsigned long long>(seed));
  return buf;
}

std::optional<OracleValue> OracleCache::lookup(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void OracleCache::store(const std::string& key, const OracleValue& value) {
  entries_[key] = value;
}

void OracleCache::save() const {
  std::ofstream out(file_, std::ios::trunc);
  out << "key,value,std_err\n";
  char buf[64];
  for (const auto& [key, v] : entries_) {
    std::snprintf(buf, sizeof(buf), "%.17g", v.value);
    out << key << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", v.std_err);
    out << ',' << buf << '\n';
  }
}

}  // namespace bro
