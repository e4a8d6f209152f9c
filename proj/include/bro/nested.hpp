#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bro {

/// One simulation run: the response h(x, xi(theta)) together with the
/// pathwise gradient d(x, xi(theta)) produced from the same xi draw.
struct InnerObservation {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// One outer draw theta with its m inner runs. Values and gradients are
/// stored columnwise so a sample with a large inner budget stays compact.
class NestedSample {
 public:
  NestedSample() = default;

  NestedSample(Eigen::VectorXd theta, Eigen::VectorXd values, Eigen::MatrixXd gradients)
      : theta_(std::move(theta)), values_(std::move(values)), gradients_(std::move(gradients)) {
    if (values_.size() < 1) throw std::invalid_argument("nested sample needs m >= 1 inner runs");
    if (gradients_.cols() != values_.size()) {
      throw std::invalid_argument("inner values and gradients must pair up");
    }
  }

  static NestedSample from_observations(Eigen::VectorXd theta,
                                        const std::vector<InnerObservation>& inner) {
    if (inner.empty()) throw std::invalid_argument("nested sample needs m >= 1 inner runs");
    const Eigen::Index dim = inner.front().gradient.size();
    Eigen::VectorXd values(static_cast<Eigen::Index>(inner.size()));
    Eigen::MatrixXd gradients(dim, static_cast<Eigen::Index>(inner.size()));
    for (std::size_t j = 0; j < inner.size(); ++j) {
      if (inner[j].gradient.size() != dim) {
        throw std::invalid_argument("inner gradients must share one dimension");
      }
      values[static_cast<Eigen::Index>(j)] = inner[j].value;
      gradients.col(static_cast<Eigen::Index>(j)) = inner[j].gradient;
    }
    return NestedSample(std::move(theta), std::move(values), std::move(gradients));
  }

  const Eigen::VectorXd& theta() const { return theta_; }
  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::MatrixXd& gradients() const { return gradients_; }

  Eigen::Index inner_count() const { return values_.size(); }
  Eigen::Index gradient_dim() const { return gradients_.rows(); }

  /// The inner Monte Carlo mean of h over the m runs.
  double mean_value() const { return values_.mean(); }

  /// The inner Monte Carlo mean of d over the same m runs.
  Eigen::VectorXd mean_gradient() const { return gradients_.rowwise().mean(); }

 private:
  Eigen::VectorXd theta_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd gradients_;
};

/// n nested samples simulated at a common decision point with a uniform
/// inner budget m.
class NestedBatch {
 public:
  NestedBatch() = default;

  NestedBatch(Eigen::VectorXd decision, std::vector<NestedSample> samples)
      : decision_(std::move(decision)), samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("nested batch needs n >= 1 samples");
    const Eigen::Index m = samples_.front().inner_count();
    const Eigen::Index dim = samples_.front().gradient_dim();
    for (const NestedSample& s : samples_) {
      if (s.inner_count() != m) throw std::invalid_argument("nested batch requires a uniform inner budget");
      if (s.gradient_dim() != dim) throw std::invalid_argument("nested batch requires one gradient dimension");
    }
  }

  const Eigen::VectorXd& decision() const { return decision_; }
  const std::vector<NestedSample>& samples() const { return samples_; }

  std::size_t size() const { return samples_.size(); }
  Eigen::Index inner_count() const { return samples_.front().inner_count(); }
  Eigen::Index gradient_dim() const { return samples_.front().gradient_dim(); }

 private:
  Eigen::VectorXd decision_;
  std::vector<NestedSample> samples_;
};

/// Return envelope for the gradient estimators: the gradient itself, the
/// co-computed objective estimate, and named diagnostics (e.g. the empirical
/// quantile actually used by the tail estimators).
struct GradientEstimate {
  Eigen::VectorXd gradient;
  double objective = 0.0;
  std::map<std::string, double> diagnostics;
};

}  // namespace bro
