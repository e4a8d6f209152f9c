#pragma once

#include <Eigen/Core>
#include <functional>

#include "bro/models.hpp"

namespace bro {

struct NelderMeadOptions {
  Box box;
  double initial_edge = 0.0;  // 0 picks 5% of the smallest box width
  long max_iterations = 100000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  long evaluations = 0;
};

/// Nelder-Mead simplex search with coefficients (1, 2, 0.5, 0.5), counted in
/// objective evaluations; returns the best point seen when the budget runs
/// out. One-dimensional problems use the degenerate two-point simplex.
/// Candidate points are clamped to the box.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& x0, long max_evals,
                             const NelderMeadOptions& options);

}  // namespace bro
