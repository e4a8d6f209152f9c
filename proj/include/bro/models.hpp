#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "bro/nested.hpp"
#include "bro/rng.hpp"

namespace bro {

/// Per-coordinate box constraints for the decision variable.
struct Box {
  Eigen::ArrayXd lo;
  Eigen::ArrayXd hi;

  Box() = default;
  Box(Eigen::ArrayXd lo_, Eigen::ArrayXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || (lo > hi).any()) {
      throw std::invalid_argument("box bounds must satisfy lo <= hi per coordinate");
    }
  }

  static Box interval(double lo, double hi) {
    return Box(Eigen::ArrayXd::Constant(1, lo), Eigen::ArrayXd::Constant(1, hi));
  }

  Eigen::Index dim() const { return lo.size(); }
  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lo).all() && (x.array() <= hi).all();
  }
};

/// Per-coordinate clamp onto the box.
inline Eigen::VectorXd project(const Eigen::VectorXd& x, const Box& box) {
  return x.array().max(box.lo).min(box.hi).matrix();
}

/// Simulation oracle producing h(x, xi(theta)) and its pathwise gradient
/// d(x, xi(theta)) from one shared xi draw. simulate must be a pure function
/// of (x, theta, stream).
class SimulationModel {
 public:
  virtual ~SimulationModel() = default;

  virtual Eigen::Index decision_dim() const = 0;
  virtual const Box& decision_box() const = 0;
  virtual InnerObservation simulate(const Eigen::VectorXd& x, const Eigen::VectorXd& theta,
                                    RngStream stream) const = 0;
};

/// h(x, xi(theta)) = x theta1 + x^2 theta2 + x xi with xi ~ N(0, theta1^2 / s)
/// and pathwise gradient theta1 + 2 x theta2 + xi.
class QuadraticModel final : public SimulationModel {
 public:
  explicit QuadraticModel(double noise_scale_divisor = 100.0,
                          Box box = Box::interval(-5.0, 5.0));

  Eigen::Index decision_dim() const override { return 1; }
  const Box& decision_box() const override { return box_; }
  InnerObservation simulate(const Eigen::VectorXd& x, const Eigen::VectorXd& theta,
                            RngStream stream) const override;

  double noise_scale_divisor() const { return noise_scale_divisor_; }

 private:
  double noise_scale_divisor_;
  Box box_;
};

/// Customer arrival rate at price p: lambda(p) = K_C 2 e^{-theta p} / (1 + e^{-theta p}).
double rate_lambda(double p, double theta_c, double k_c = 40.0);
double rate_lambda_dp(double p, double theta_c, double k_c = 40.0);

/// Provider arrival rate at price p: mu(p) = K_P (1 - e^{-theta p}) / (1 + e^{-theta p}).
double rate_mu(double p, double theta_p, double k_p = 20.0);
double rate_mu_dp(double p, double theta_p, double k_p = 20.0);

/// Two-sided market: the i-th customer is served by the i-th provider and
/// waits W_i = max(0, A^P_i - A^C_i); the response is the average wait over
/// the first M customers minus the revenue term a p lambda(p). Arrival times
/// are scaled cumulative sums of unit exponentials, so the sample path is
/// differentiable in p via dA/dp = -A * rate'(p) / rate(p).
class MarketModel final : public SimulationModel {
 public:
  struct Params {
    double k_c = 40.0;
    double k_p = 20.0;
    int customers = 100;          // M, number of waits averaged
    double revenue_weight = 0.04; // a
    double price_lo = 1.0;
    double price_hi = 300.0;
  };

  MarketModel() : MarketModel(Params{}) {}
  explicit MarketModel(const Params& params);

  Eigen::Index decision_dim() const override { return 1; }
  const Box& decision_box() const override { return box_; }
  InnerObservation simulate(const Eigen::VectorXd& x, const Eigen::VectorXd& theta,
                            RngStream stream) const override;

  const Params& params() const { return params_; }

 private:
  Params params_;
  Box box_;
};

}  // namespace bro
