#include "bro/posterior.hpp"

#include <cmath>

namespace bro {

Eigen::VectorXd GaussianPosterior::sample(RngStream stream) const {
  SplitMix64 eng = stream.engine();
  Eigen::VectorXd theta(mean_.size());
  for (Eigen::Index i = 0; i < mean_.size(); ++i) {
    theta[i] = mean_[i] + stddev_[i] * standard_normal(eng);
  }
  return theta;
}

Eigen::VectorXd EmpiricalPosterior::sample(RngStream stream) const {
  SplitMix64 eng = stream.engine();
  Eigen::VectorXd theta(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    const auto& chain = components_[static_cast<std::size_t>(i)];
    const auto idx = static_cast<std::size_t>(uniform01(eng) * static_cast<double>(chain.size()));
    theta[i] = chain[idx < chain.size() ? idx : chain.size() - 1];
  }
  return theta;
}

MCMCResult metropolis_hastings(const MCMCConfig& cfg,
                               const std::function<double(double)>& log_likelihood) {
  cfg.validate();
  SplitMix64 eng = RngStream(cfg.seed).engine();

  MCMCResult result;
  result.states.reserve(static_cast<std::size_t>(cfg.chain_length));

  double current = cfg.init;
  double current_ll = log_likelihood(current);
  const long total = cfg.burn_in + cfg.chain_length;
  for (long t = 0; t < total; ++t) {
    const double candidate = current + cfg.proposal_std * standard_normal(eng);
    const double u = uniform01(eng);
    ++result.proposals;
    if (candidate <= cfg.prior_lo || candidate >= cfg.prior_hi) {
      ++result.out_of_bounds;
    } else {
      const double candidate_ll = log_likelihood(candidate);
      if (std::log(u > 0.0 ? u : 0x1.0p-53) < candidate_ll - current_ll) {
        current = candidate;
        current_ll = candidate_ll;
        ++result.accepted;
      }
    }
    if (t >= cfg.burn_in) result.states.push_back(current);
  }
  return result;
}

double interarrival_log_likelihood(double theta, const std::vector<double>& data,
                                   const std::function<double(double, double)>& rate_fn,
                                   double p_obs) {
  const double rate = rate_fn(p_obs, theta);
  if (!(rate > 0.0)) throw std::domain_error("interarrival likelihood needs a positive rate");
  double sum = 0.0;
  for (double xi : data) sum += xi;
  return static_cast<double>(data.size()) * std::log(rate) - rate * sum;
}

std::vector<double> synthetic_interarrivals(double rate, int n, RngStream stream) {
  if (!(rate > 0.0)) throw std::domain_error("interarrival rate must be positive");
  SplitMix64 eng = stream.engine();
  std::vector<double> data(static_cast<std::size_t>(n));
  for (double& d : data) d = unit_exponential(eng) / rate;
  return data;
}

}  // namespace bro
