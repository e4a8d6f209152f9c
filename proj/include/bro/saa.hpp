#pragma once

#include <Eigen/Core>
#include <vector>

#include "bro/estimators.hpp"
#include "bro/models.hpp"
#include "bro/nested.hpp"
#include "bro/posterior.hpp"
#include "bro/risk.hpp"
#include "bro/rng.hpp"

namespace bro {

/// Sample-average approximation of a nested risk objective: the theta draws
/// and the per-(i, j) randomness streams are fixed once, so objective and
/// gradient become deterministic functions of x (common random numbers
/// across decision values).
class FrozenProblem {
 public:
  FrozenProblem(const SimulationModel& model, const RiskSpec& spec,
                std::vector<Eigen::VectorXd> thetas, std::vector<RngStream> sample_streams, int m);

  double objective(const Eigen::VectorXd& x) const;
  GradientEstimate gradient(const Eigen::VectorXd& x) const;

  /// Re-simulates the frozen randomness at x (aggregated inner storage).
  NestedBatch rebuild(const Eigen::VectorXd& x) const;

  int outer_count() const { return static_cast<int>(thetas_.size()); }
  int inner_count() const { return m_; }

 private:
  const SimulationModel* model_;
  RiskSpec spec_;
  std::vector<Eigen::VectorXd> thetas_;
  std::vector<RngStream> sample_streams_;
  int m_;
};

/// Draws theta_1..theta_n and pins the inner randomness streams; uses the
/// same substream layout as simulate_batch so the frozen problem at a given
/// stream reproduces the stochastic batch drawn from that stream.
FrozenProblem saa_freeze(const SimulationModel& model, const PosteriorSampler& posterior,
                         const RiskSpec& spec, int n, int m, RngStream stream);

}  // namespace bro
