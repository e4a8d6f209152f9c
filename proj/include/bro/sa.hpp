#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "bro/estimators.hpp"
#include "bro/models.hpp"
#include "bro/posterior.hpp"
#include "bro/risk.hpp"
#include "bro/rng.hpp"
#include "bro/schedules.hpp"

namespace bro {

struct SAIteration {
  long t = 0;
  Eigen::VectorXd x;         // iterate before the update
  Eigen::VectorXd y;         // descent direction applied
  double objective = 0.0;    // co-computed objective estimate at x
  int n = 0;
  int m = 0;
  double eps = 0.0;
};

/// Full iterate history of one projected stochastic-approximation run.
struct SATrace {
  std::vector<SAIteration> iterations;
  Eigen::VectorXd final_x;
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string abort_message;
};

/// Projected SA: x_{t+1} = project(x_t + eps_t Y_t) where Y_t is the negated
/// risk-matched ascent gradient estimated from a fresh nested batch of size
/// (n_t, m_t) drawn at x_t. Randomness for iteration t comes from
/// stream.child(t).
SATrace sa_run(const SimulationModel& model, const PosteriorSampler& posterior,
               const RiskSpec& spec, const StepSchedule& steps, const BudgetSchedule& budget,
               const Eigen::VectorXd& x0, long iterations, RngStream stream);

/// One risk-matched ascent gradient estimate at x with budget (n, m) and the
/// given batch count (used by sa_run and the SAA-mode benchmarks).
GradientEstimate estimate_gradient(const SimulationModel& model, const PosteriorSampler& posterior,
                                   const RiskSpec& spec, const Eigen::VectorXd& x, int n, int m,
                                   int k_batches, RngStream stream);

}  // namespace bro
