#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bro/models.hpp"
#include "bro/posterior.hpp"
#include "bro/risk.hpp"
#include "bro/rng.hpp"

namespace bro {

/// Independent normal posterior components for the quadratic model;
/// degenerate (zero) stds are allowed here so plug-in objectives are covered.
struct QuadraticPosteriorParams {
  double mu1 = -15.0;
  double mu2 = 10.0;
  double sigma1 = 4.0;
  double sigma2 = 2.0;
};

struct ClosedFormResult {
  double value = 0.0;
  double gradient = 0.0;
  bool gradient_one_sided = false;  // set at x = 0 where sigma_H has a kink
};

/// Exact objective value and derivative of the quadratic-model risk
/// objectives: H(x; theta) is normal with mean x mu1 + x^2 mu2 and std
/// sqrt(x^2 sigma1^2 + x^4 sigma2^2), so all four objectives close over the
/// normal quantile and density.
ClosedFormResult quadratic_closed_form(double x, const RiskSpec& spec,
                                       const QuadraticPosteriorParams& posterior);

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Minimizer of the closed form over the box: coarse scan, then golden
/// section to the requested x tolerance.
ScalarOptimum quadratic_optimum(const RiskSpec& spec, const QuadraticPosteriorParams& posterior,
                                double lo = -5.0, double hi = 5.0, double xtol = 1e-8);

struct OracleValue {
  double value = 0.0;
  double std_err = 0.0;
};

/// Nested Monte Carlo estimate of rho{H(x; theta)} with all randomness a
/// pure function of (stream, i, j) and independent of x, so evaluations at
/// different x with one stream share common random numbers. The standard
/// error comes from outer batching.
OracleValue brute_force_objective(const SimulationModel& model, const PosteriorSampler& posterior,
                                  const RiskSpec& spec, const Eigen::VectorXd& x, int n, int m,
                                  RngStream stream);

/// Brute-force evaluation on an even grid over the model box (or an
/// override interval) with one shared stream; returns the arg-min.
ScalarOptimum grid_search(const SimulationModel& model, const PosteriorSampler& posterior,
                          const RiskSpec& spec, double grid_step, int n, int m, RngStream stream,
                          std::optional<std::pair<double, double>> interval = std::nullopt);

/// Exponential-family MLE identity: rate = 1 / sample mean.
double exponential_rate_mle(const std::vector<double>& data);

/// Solves rate_fn(p_obs, theta) = target_rate for theta by bisection on
/// [theta_lo, theta_hi]; values outside the attainable range clamp to the
/// nearer endpoint (boundary MLE).
double invert_rate(const std::function<double(double, double)>& rate_fn, double p_obs,
                   double target_rate, double theta_lo, double theta_hi);

struct MleBaseline {
  double theta_c = 0.0;
  double theta_p = 0.0;
  double price = 0.0;
  double value = 0.0;  // plug-in objective at the grid minimizer
};

/// Per-component MLE of the market sensitivities from interarrival data,
/// followed by a grid search of the plug-in expectation objective.
MleBaseline mle_baseline(const MarketModel& model, const std::vector<double>& data_customers,
                         const std::vector<double>& data_providers, double p_obs,
                         double grid_step, int n, int m, RngStream stream);

/// CSV-backed memo of brute-force oracle values keyed by
/// (model, spec, x, n, m, seed).
class OracleCache {
 public:
  explicit OracleCache(std::filesystem::path file);

  static std::string key(const std::string& model_name, const RiskSpec& spec, double x, int n,
                         int m, std::uint64_t seed);

  std::optional<OracleValue> lookup(const std::string& key) const;
  void store(const std::string& key, const OracleValue& value);
  void save() const;

 private:
  std::filesystem::path file_;
  std::map<std::string, OracleValue> entries_;
};

}  // namespace bro
