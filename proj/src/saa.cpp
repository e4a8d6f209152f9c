#include "bro/saa.hpp"

#include <stdexcept>

namespace bro {

FrozenProblem::FrozenProblem(const SimulationModel& model, const RiskSpec& spec,
                             std::vector<Eigen::VectorXd> thetas,
                             std::vector<RngStream> sample_streams, int m)
    : model_(&model),
      spec_(spec),
      thetas_(std::move(thetas)),
      sample_streams_(std::move(sample_streams)),
      m_(m) {
  spec_.validate();
  if (thetas_.empty() || thetas_.size() != sample_streams_.size() || m_ < 1) {
    throw std::invalid_argument("frozen problem needs n >= 1 pinned draws and m >= 1");
  }
}

NestedBatch FrozenProblem::rebuild(const Eigen::VectorXd& x) const {
  std::vector<NestedSample> samples;
  samples.reserve(thetas_.size());
  const Eigen::Index dim = model_->decision_dim();
  for (std::size_t i = 0; i < thetas_.size(); ++i) {
    double value_sum = 0.0;
    Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < m_; ++j) {
      const InnerObservation obs =
          model_->simulate(x, thetas_[i], sample_streams_[i].child(1 + static_cast<std::uint64_t>(j)));
      value_sum += obs.value;
      grad_sum += obs.gradient;
    }
    const double inv_m = 1.0 / static_cast<double>(m_);
    samples.emplace_back(thetas_[i], Eigen::VectorXd::Constant(1, value_sum * inv_m),
                         grad_sum * inv_m);
  }
  return NestedBatch(x, std::move(samples));
}

double FrozenProblem::objective(const Eigen::VectorXd& x) const {
  return batch_objective(rebuild(x), spec_);
}

GradientEstimate FrozenProblem::gradient(const Eigen::VectorXd& x) const {
  const NestedBatch batch = rebuild(x);
  switch (spec_.kind) {
    case RiskSpec::Kind::expectation:
      return grad_expectation(batch);
    case RiskSpec::Kind::mean_variance: {
      // Exact derivative of the frozen mean + weight * sample-variance.
      const std::size_t n = batch.size();
      double h_mean = 0.0;
      Eigen::VectorXd d_mean = Eigen::VectorXd::Zero(batch.gradient_dim());
      for (const NestedSample& s : batch.samples()) {
        h_mean += s.mean_value();
        d_mean += s.mean_gradient();
      }
      h_mean /= static_cast<double>(n);
      d_mean /= static_cast<double>(n);
      Eigen::VectorXd cov = Eigen::VectorXd::Zero(batch.gradient_dim());
      double var = 0.0;
      for (const NestedSample& s : batch.samples()) {
        const double dh = s.mean_value() - h_mean;
        cov += dh * (s.mean_gradient() - d_mean);
        var += dh * dh;
      }
      GradientEstimate out;
      if (n > 1) {
        cov /= static_cast<double>(n - 1);
        var /= static_cast<double>(n - 1);
      }
      out.gradient = d_mean + spec_.weight * 2.0 * cov;
      out.objective = h_mean + spec_.weight * var;
      return out;
    }
    case RiskSpec::Kind::var:
      return grad_var(batch, spec_.alpha);
    case RiskSpec::Kind::cvar:
      return grad_cvar(batch, spec_.alpha);
  }
  throw std::logic_error("unhandled risk kind");
}

FrozenProblem saa_freeze(const SimulationModel& model, const PosteriorSampler& posterior,
                         const RiskSpec& spec, int n, int m, RngStream stream) {
  if (n < 1 || m < 1) throw std::invalid_argument("SAA budgets need n >= 1 and m >= 1");
  std::vector<Eigen::VectorXd> thetas;
  std::vector<RngStream> streams;
  thetas.reserve(static_cast<std::size_t>(n));
  streams.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const RngStream si = stream.child(static_cast<std::uint64_t>(i));
    thetas.push_back(posterior.sample(si.child(0)));
    streams.push_back(si);
  }
  return FrozenProblem(model, spec, std::move(thetas), std::move(streams), m);
}

}  // namespace bro
