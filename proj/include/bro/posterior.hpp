#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bro/rng.hpp"

namespace bro {

/// Source of posterior draws theta ~ P^N. sample must be a pure function of
/// the stream so concurrent callers only need disjoint substreams.
class PosteriorSampler {
 public:
  virtual ~PosteriorSampler() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd sample(RngStream stream) const = 0;
};

/// Independent normal components theta_i ~ N(mean_i, std_i^2).
class GaussianPosterior final : public PosteriorSampler {
 public:
  GaussianPosterior(Eigen::VectorXd mean, Eigen::VectorXd stddev)
      : mean_(std::move(mean)), stddev_(std::move(stddev)) {
    if (mean_.size() != stddev_.size()) {
      throw std::invalid_argument("posterior mean/std dimension mismatch");
    }
    if (!(stddev_.array() > 0.0).all()) {
      throw std::invalid_argument("posterior component stds must be positive");
    }
  }

  Eigen::Index dim() const override { return mean_.size(); }
  Eigen::VectorXd sample(RngStream stream) const override;

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& stddev() const { return stddev_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd stddev_;
};

/// Point mass at a fixed theta (plug-in objectives, degenerate tests).
class DiracPosterior final : public PosteriorSampler {
 public:
  explicit DiracPosterior(Eigen::VectorXd theta) : theta_(std::move(theta)) {}
  Eigen::Index dim() const override { return theta_.size(); }
  Eigen::VectorXd sample(RngStream) const override { return theta_; }

 private:
  Eigen::VectorXd theta_;
};

/// Empirical posterior built from per-component sample lists (e.g. one MCMC
/// chain per component when the likelihood separates). A draw picks a
/// discrete-uniform index independently in every component.
class EmpiricalPosterior final : public PosteriorSampler {
 public:
  explicit EmpiricalPosterior(std::vector<std::vector<double>> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("empirical posterior needs components");
    for (const auto& c : components_) {
      if (c.empty()) throw std::invalid_argument("empirical posterior components must be non-empty");
    }
  }

  Eigen::Index dim() const override { return static_cast<Eigen::Index>(components_.size()); }
  Eigen::VectorXd sample(RngStream stream) const override;

  const std::vector<double>& component(std::size_t i) const { return components_.at(i); }

 private:
  std::vector<std::vector<double>> components_;
};

/// Random-walk Metropolis-Hastings setup over a scalar parameter with a
/// uniform prior on (prior_lo, prior_hi).
struct MCMCConfig {
  double proposal_std = 2.5e-2;
  double prior_lo = 0.01;
  double prior_hi = 0.5;
  long chain_length = 1000000;  // post burn-in states kept
  long burn_in = 100000;
  double init = 0.075;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(proposal_std > 0.0)) throw std::invalid_argument("proposal std must be positive");
    if (!(prior_lo < init && init < prior_hi)) {
      throw std::invalid_argument("chain init must lie inside the prior support");
    }
    if (!(burn_in >= 0 && burn_in < chain_length)) {
      throw std::invalid_argument("burn-in must be shorter than the chain");
    }
  }
};

struct MCMCResult {
  std::vector<double> states;  // post burn-in only
  long proposals = 0;
  long accepted = 0;
  long out_of_bounds = 0;  // candidates proposed outside the prior support, all rejected
  double acceptance_rate() const {
    return proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
  }
};

/// Random-walk chain with Normal(0, proposal_std^2) increments; candidates
/// outside the prior support are rejected outright, otherwise accepted with
/// probability min(1, exp(loglik(cand) - loglik(cur))).
MCMCResult metropolis_hastings(const MCMCConfig& cfg,
                               const std::function<double(double)>& log_likelihood);

/// Log likelihood of i.i.d. exponential interarrivals observed at price
/// p_obs, with the rate given by rate_fn(p_obs, theta).
double interarrival_log_likelihood(double theta, const std::vector<double>& data,
                                   const std::function<double(double, double)>& rate_fn,
                                   double p_obs);

/// Draws n i.i.d. exponential interarrivals with the given rate.
std::vector<double> synthetic_interarrivals(double rate, int n, RngStream stream);

}  // namespace bro
