#include "bro/models.hpp"

#include <cmath>

namespace bro {

QuadraticModel::QuadraticModel(double noise_scale_divisor, Box box)
    : noise_scale_divisor_(noise_scale_divisor), box_(std::move(box)) {
  if (!(noise_scale_divisor_ > 0.0)) {
    throw std::invalid_argument("noise scale divisor must be positive");
  }
}

InnerObservation QuadraticModel::simulate(const Eigen::VectorXd& x, const Eigen::VectorXd& theta,
                                          RngStream stream) const {
  const double xv = x[0];
  const double t1 = theta[0];
  const double t2 = theta[1];
  SplitMix64 eng = stream.engine();
  const double xi = std::sqrt(t1 * t1 / noise_scale_divisor_) * standard_normal(eng);
  InnerObservation obs;
  obs.value = xv * t1 + xv * xv * t2 + xv * xi;
  obs.gradient = Eigen::VectorXd::Constant(1, t1 + 2.0 * xv * t2 + xi);
  return obs;
}

double rate_lambda(double p, double theta_c, double k_c) {
  const double e = std::exp(-theta_c * p);
  return k_c * 2.0 * e / (1.0 + e);
}

double rate_lambda_dp(double p, double theta_c, double k_c) {
  const double e = std::exp(-theta_c * p);
  const double denom = (1.0 + e) * (1.0 + e);
  return -2.0 * k_c * theta_c * e / denom;
}

double rate_mu(double p, double theta_p, double k_p) {
  const double e = std::exp(-theta_p * p);
  return k_p * (1.0 - e) / (1.0 + e);
}

double rate_mu_dp(double p, double theta_p, double k_p) {
  const double e = std::exp(-theta_p * p);
  const double denom = (1.0 + e) * (1.0 + e);
  return 2.0 * k_p * theta_p * e / denom;
}

MarketModel::MarketModel(const Params& params)
    : params_(params), box_(Box::interval(params.price_lo, params.price_hi)) {
  if (params_.customers < 1) throw std::invalid_argument("market needs at least one customer");
  if (!(params_.k_c > 0.0 && params_.k_p > 0.0)) {
    throw std::invalid_argument("market populations must be positive");
  }
}

InnerObservation MarketModel::simulate(const Eigen::VectorXd& x, const Eigen::VectorXd& theta,
                                       RngStream stream) const {
  const double p = x[0];
  const double theta_c = theta[0];
  const double theta_p = theta[1];
  const double lambda = rate_lambda(p, theta_c, params_.k_c);
  const double mu = rate_mu(p, theta_p, params_.k_p);
  if (!(mu > 0.0)) {
    throw std::domain_error("provider arrival rate must be positive (p = 0 is outside the model)");
  }
  const double dlambda = rate_lambda_dp(p, theta_c, params_.k_c);
  const double dmu = rate_mu_dp(p, theta_p, params_.k_p);

  SplitMix64 eng = stream.engine();
  double sum_c = 0.0;  // running sums of unit exponentials
  double sum_p = 0.0;
  double wait_sum = 0.0;
  double wait_grad_sum = 0.0;
  for (int i = 0; i < params_.customers; ++i) {
    sum_c += unit_exponential(eng);
    sum_p += unit_exponential(eng);
    const double a_c = sum_c / lambda;
    const double a_p = sum_p / mu;
    const double w = a_p - a_c;
    if (w > 0.0) {
      wait_sum += w;
      // dA/dp for inverse-rate-scaled arrival times
      wait_grad_sum += (-a_p * dmu / mu) - (-a_c * dlambda / lambda);
    }
  }
  const double inv_m = 1.0 / static_cast<double>(params_.customers);
  InnerObservation obs;
  obs.value = wait_sum * inv_m - params_.revenue_weight * p * lambda;
  obs.gradient = Eigen::VectorXd::Constant(
      1, wait_grad_sum * inv_m - params_.revenue_weight * (lambda + p * dlambda));
  return obs;
}

}  // namespace bro
