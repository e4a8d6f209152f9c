#include "bro/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bro {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("risk level alpha must lie in (0,1)");
  }
}

// 1-based order-statistic rank ceil(alpha * n), clamped to [1, n]. The tiny
// slack keeps exact products like 0.7 * 10 from being pushed to the next rank
// by floating point noise.
std::size_t quantile_rank(double alpha, std::size_t n) {
  const double raw = std::ceil(alpha * static_cast<double>(n) - 1e-9);
  const auto rank = static_cast<long>(raw);
  if (rank < 1) return 1;
  if (rank > static_cast<long>(n)) return n;
  return static_cast<std::size_t>(rank);
}

std::vector<double> inner_means(const NestedBatch& batch) {
  std::vector<double> means(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) means[i] = batch.samples()[i].mean_value();
  return means;
}

VarEstimate var_from_means(const std::vector<double>& means, double alpha) {
  std::vector<std::size_t> order(means.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (means[a] != means[b]) return means[a] < means[b];
    return a < b;
  });
  const std::size_t idx = order[quantile_rank(alpha, means.size()) - 1];
  return VarEstimate{means[idx], idx};
}

}  // namespace

double nested_mean(const NestedBatch& batch) {
  double sum = 0.0;
  for (const NestedSample& s : batch.samples()) sum += s.mean_value();
  return sum / static_cast<double>(batch.size());
}

double batch_objective(const NestedBatch& batch, const RiskSpec& spec) {
  switch (spec.kind) {
    case RiskSpec::Kind::expectation:
      return nested_mean(batch);
    case RiskSpec::Kind::mean_variance: {
      const double mean = nested_mean(batch);
      double ss = 0.0;
      for (const NestedSample& s : batch.samples()) {
        const double d = s.mean_value() - mean;
        ss += d * d;
      }
      const double var = batch.size() > 1 ? ss / static_cast<double>(batch.size() - 1) : 0.0;
      return mean + spec.weight * var;
    }
    case RiskSpec::Kind::var:
      return empirical_var(batch, spec.alpha).value;
    case RiskSpec::Kind::cvar:
      return empirical_cvar(batch, spec.alpha);
  }
  throw std::logic_error("unhandled risk kind");
}

VarEstimate empirical_var(const NestedBatch& batch, double alpha) {
  require_alpha(alpha);
  return var_from_means(inner_means(batch), alpha);
}

double empirical_cvar(const NestedBatch& batch, double alpha) {
  require_alpha(alpha);
  const std::vector<double> means = inner_means(batch);
  const VarEstimate v = var_from_means(means, alpha);
  double sum = 0.0;
  for (double h : means) {
    if (h >= v.value) sum += h;
  }
  return sum / (static_cast<double>(batch.size()) * (1.0 - alpha));
}

GradientEstimate grad_expectation(const NestedBatch& batch) {
  // All samples share one inner budget, so the grand mean over the n*m inner
  // gradients equals the mean of the per-sample means.
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(batch.gradient_dim());
  double obj = 0.0;
  for (const NestedSample& s : batch.samples()) {
    grad += s.mean_gradient();
    obj += s.mean_value();
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  GradientEstimate out;
  out.gradient = grad * inv_n;
  out.objective = obj * inv_n;
  return out;
}

GradientEstimate grad_var(const NestedBatch& batch, double alpha) {
  require_alpha(alpha);
  const VarEstimate v = var_from_means(inner_means(batch), alpha);
  GradientEstimate out;
  out.gradient = batch.samples()[v.sample_index].mean_gradient();
  out.objective = v.value;
  out.diagnostics["v_hat"] = v.value;
  return out;
}

GradientEstimate grad_var_batched(std::span<const NestedBatch> batches, double alpha) {
  if (batches.empty()) throw std::domain_error("batched VaR gradient needs k >= 1 batches");
  GradientEstimate out;
  out.gradient = Eigen::VectorXd::Zero(batches.front().gradient_dim());
  out.diagnostics["k"] = static_cast<double>(batches.size());
  double obj = 0.0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const GradientEstimate single = grad_var(batches[b], alpha);
    out.gradient += single.gradient;
    obj += single.objective;
    out.diagnostics["phi_" + std::to_string(b)] = single.gradient[0];
  }
  const double inv_k = 1.0 / static_cast<double>(batches.size());
  out.gradient *= inv_k;
  out.objective = obj * inv_k;
  return out;
}

GradientEstimate grad_cvar(const NestedBatch& batch, double alpha) {
  require_alpha(alpha);
  const std::vector<double> means = inner_means(batch);
  const VarEstimate v = var_from_means(means, alpha);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(batch.gradient_dim());
  double value_sum = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i] >= v.value) {
      grad += batch.samples()[i].mean_gradient();
      value_sum += means[i];
    }
  }
  const double scale = 1.0 / (static_cast<double>(batch.size()) * (1.0 - alpha));
  GradientEstimate out;
  out.gradient = grad * scale;
  out.objective = value_sum * scale;
  out.diagnostics["v_hat"] = v.value;
  return out;
}

double indicator_mismatch(const NestedBatch& batch, double alpha,
                          const Eigen::VectorXd& true_values, double true_var) {
  require_alpha(alpha);
  if (true_values.size() != static_cast<Eigen::Index>(batch.size())) {
    throw std::domain_error("indicator_mismatch needs one exact H per sample");
  }
  const std::vector<double> means = inner_means(batch);
  const VarEstimate v = var_from_means(means, alpha);
  long mismatches = 0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const bool noisy = means[i] >= v.value;
    const bool exact = true_values[static_cast<Eigen::Index>(i)] >= true_var;
    if (noisy != exact) ++mismatches;
  }
  return static_cast<double>(mismatches) / static_cast<double>(batch.size());
}

GradientEstimate grad_mean_variance(const SimulationModel& model,
                                    const PosteriorSampler& posterior,
                                    const Eigen::VectorXd& x, double weight, RngStream stream,
                                    MeanVarianceRuns runs) {
  if (!(weight >= 0.0 && std::isfinite(weight))) {
    throw std::domain_error("mean-variance weight must be finite and >= 0");
  }
  GradientEstimate out;
  if (runs == MeanVarianceRuns::five) {
    const Eigen::VectorXd th1 = posterior.sample(stream.child(0));
    const Eigen::VectorXd th2 = posterior.sample(stream.child(1));
    const Eigen::VectorXd th3 = posterior.sample(stream.child(2));
    const Eigen::VectorXd th4 = posterior.sample(stream.child(3));
    const InnerObservation r1 = model.simulate(x, th1, stream.child(4));
    const InnerObservation r2 = model.simulate(x, th2, stream.child(5));
    const InnerObservation r3 = model.simulate(x, th2, stream.child(6));
    const InnerObservation r4 = model.simulate(x, th3, stream.child(7));
    const InnerObservation r5 = model.simulate(x, th4, stream.child(8));
    out.gradient = r1.gradient + 2.0 * weight * (r2.value * r3.gradient - r4.value * r5.gradient);
    out.objective = r1.value + weight * (r2.value * r3.value - r4.value * r5.value);
  } else {
    // Shared-draw variant: one run plays the roles of runs 1, 2 and 4.
    const Eigen::VectorXd th1 = posterior.sample(stream.child(0));
    const Eigen::VectorXd th4 = posterior.sample(stream.child(1));
    const InnerObservation r1 = model.simulate(x, th1, stream.child(2));
    const InnerObservation r3 = model.simulate(x, th1, stream.child(3));
    const InnerObservation r5 = model.simulate(x, th4, stream.child(4));
    out.gradient = r1.gradient + 2.0 * weight * (r1.value * r3.gradient - r1.value * r5.gradient);
    out.objective = r1.value + weight * (r1.value * r3.value - r1.value * r5.value);
  }
  return out;
}

NestedBatch simulate_batch(const SimulationModel& model, const PosteriorSampler& posterior,
                           const Eigen::VectorXd& x, int n, int m, RngStream stream,
                           InnerStorage storage) {
  if (n < 1 || m < 1) throw std::invalid_argument("batch budgets need n >= 1 and m >= 1");
  std::vector<NestedSample> samples;
  samples.reserve(static_cast<std::size_t>(n));
  const Eigen::Index dim = model.decision_dim();
  for (int i = 0; i < n; ++i) {
    const RngStream si = stream.child(static_cast<std::uint64_t>(i));
    Eigen::VectorXd theta = posterior.sample(si.child(0));
    if (storage == InnerStorage::full) {
      Eigen::VectorXd values(m);
      Eigen::MatrixXd gradients(dim, m);
      for (int j = 0; j < m; ++j) {
        const InnerObservation obs = model.simulate(x, theta, si.child(1 + static_cast<std::uint64_t>(j)));
        values[j] = obs.value;
        gradients.col(j) = obs.gradient;
      }
      samples.emplace_back(std::move(theta), std::move(values), std::move(gradients));
    } else {
      double value_sum = 0.0;
      Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(dim);
      for (int j = 0; j < m; ++j) {
        const InnerObservation obs = model.simulate(x, theta, si.child(1 + static_cast<std::uint64_t>(j)));
        value_sum += obs.value;
        grad_sum += obs.gradient;
      }
      const double inv_m = 1.0 / static_cast<double>(m);
      samples.emplace_back(std::move(theta), Eigen::VectorXd::Constant(1, value_sum * inv_m),
                           grad_sum * inv_m);
    }
  }
  return NestedBatch(x, std::move(samples));
}

}  // namespace bro
