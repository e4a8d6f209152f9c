#pragma once

#include <Eigen/Core>
#include <span>

#include "bro/models.hpp"
#include "bro/nested.hpp"
#include "bro/posterior.hpp"
#include "bro/risk.hpp"
#include "bro/rng.hpp"

namespace bro {

/// Mean of the inner means: (1/n) sum_i Hhat^m(x; theta_i).
double nested_mean(const NestedBatch& batch);

/// Risk-matched objective estimate from one nested batch (the gradient-free
/// route used by the derivative-free baselines).
double batch_objective(const NestedBatch& batch, const RiskSpec& spec);

/// Empirical quantile of the inner means: value and the index (into
/// batch.samples()) of the sample attaining the ceil(alpha n)-th order
/// statistic. Ties sort stably by original index.
struct VarEstimate {
  double value = 0.0;
  std::size_t sample_index = 0;
};
VarEstimate empirical_var(const NestedBatch& batch, double alpha);

/// (1 / (n (1-alpha))) sum_i Hhat_i 1{Hhat_i >= vhat}; samples tying with
/// the quantile are all included.
double empirical_cvar(const NestedBatch& batch, double alpha);

/// Gradient of the expectation objective: average of all n*m inner
/// gradients; objective is nested_mean of the same batch.
GradientEstimate grad_expectation(const NestedBatch& batch);

/// Gradient of the VaR objective: the mean inner gradient of the sample
/// whose inner mean attains the empirical quantile. Diagnostics carry the
/// quantile value under "v_hat".
GradientEstimate grad_var(const NestedBatch& batch, double alpha);

/// Batch-mean VaR gradient: arithmetic mean of grad_var over k i.i.d.
/// batches. Diagnostics carry k and the per-batch first components.
GradientEstimate grad_var_batched(std::span<const NestedBatch> batches, double alpha);

/// Gradient of the CVaR objective: tail-average of the mean inner gradients
/// with the same quantile and tie rule as empirical_cvar; objective is
/// empirical_cvar of the same batch.
GradientEstimate grad_cvar(const NestedBatch& batch, double alpha);

/// Fraction of samples whose noisy tail indicator disagrees with the exact
/// one (exact per-sample H and exact quantile supplied by the caller).
double indicator_mismatch(const NestedBatch& batch, double alpha,
                          const Eigen::VectorXd& true_values, double true_var);

enum class MeanVarianceRuns {
  five,   // unbiased variant: 4 independent theta draws, 5 independent xi draws
  three,  // cheaper variant sharing draws across terms; higher variance
};

/// One realization of the mean-variance gradient estimator
///   d(x,xi1(th1)) + 2a ( h(x,xi2(th2)) d(x,xi3(th2)) - h(x,xi4(th3)) d(x,xi5(th4)) ),
/// with the co-computed unbiased objective estimate
///   h1 + a ( h2 h3 - h4 h5 ).
GradientEstimate grad_mean_variance(const SimulationModel& model,
                                    const PosteriorSampler& posterior,
                                    const Eigen::VectorXd& x, double weight, RngStream stream,
                                    MeanVarianceRuns runs = MeanVarianceRuns::five);

/// How simulate_batch stores the inner runs: every (h, d) pair, or only the
/// per-sample inner means (distributionally equivalent for every estimator
/// above, and the only viable option for very large inner budgets).
enum class InnerStorage { full, aggregated };

/// Simulates a NestedBatch of n outer draws with m inner runs each at the
/// decision x. All randomness derives from the stream: outer draw i uses
/// stream.child(i).child(0) for theta and stream.child(i).child(1+j) for
/// inner run j, so the same stream reproduces the same randomness at any x
/// (common random numbers).
NestedBatch simulate_batch(const SimulationModel& model, const PosteriorSampler& posterior,
                           const Eigen::VectorXd& x, int n, int m, RngStream stream,
                           InnerStorage storage = InnerStorage::full);

}  // namespace bro
