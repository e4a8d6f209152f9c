#pragma once

#include <Eigen/Core>
#include <initializer_list>
#include <vector>

#include "bro/nested.hpp"

namespace bro::test {

/// Batch with one inner observation per sample (inner mean == value).
inline NestedBatch scalar_batch(std::initializer_list<double> values,
                                std::initializer_list<double> gradients, double x = 0.0) {
  std::vector<NestedSample> samples;
  auto g = gradients.begin();
  for (double v : values) {
    samples.emplace_back(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(1, v),
                         Eigen::MatrixXd::Constant(1, 1, *g++));
    }
  return NestedBatch(Eigen::VectorXd::Constant(1, x), std::move(samples));
}

inline NestedBatch scalar_batch(std::initializer_list<double> values, double x = 0.0) {
  std::vector<double> grads(values.size(), 0.0);
  std::vector<NestedSample> samples;
  std::size_t i = 0;
  for (double v : values) {
    samples.emplace_back(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(1, v),
                         Eigen::MatrixXd::Constant(1, 1, grads[i++]));
  }
  return NestedBatch(Eigen::VectorXd::Constant(1, x), std::move(samples));
}

/// Sample with several inner observations.
inline NestedSample multi_inner_sample(std::vector<double> values, std::vector<double> gradients) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::MatrixXd g(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t j = 0; j < values.size(); ++j) {
    v[static_cast<Eigen::Index>(j)] = values[j];
    g(0, static_cast<Eigen::Index>(j)) = gradients[j];
  }
  return NestedSample(Eigen::VectorXd::Zero(2), std::move(v), std::move(g));
}

}  // namespace bro::test
