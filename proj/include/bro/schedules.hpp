#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bro {

/// Step size sequence eps_t = c / (t0 + t)^gamma. The exponent is confined
/// to (0.5, 1] so that sum eps_t diverges while sum eps_t^2 stays finite.
struct StepSchedule {
  double c = 20.0;
  double t0 = 100.0;
  double gamma = 0.8;

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("step scale c must be positive");
    if (!(t0 > 0.0)) throw std::invalid_argument("step offset t0 must be positive");
    if (!(gamma > 0.5 && gamma <= 1.0)) {
      throw std::invalid_argument("step exponent gamma must lie in (0.5, 1]");
    }
  }

  double at(long t) const { return c / std::pow(t0 + static_cast<double>(t), gamma); }
};

/// Outer/inner budget sequences n_t = round(n0 + n_slope t), m_t = floor(n_t
/// / m_divisor), and the batch count k for the batched VaR estimator.
struct BudgetSchedule {
  double n0 = 100.0;
  double n_slope = 0.5;
  double m_divisor = 10.0;
  int k_batches = 1;

  void validate() const {
    if (!(n0 >= 1.0)) throw std::invalid_argument("outer budget must start at n0 >= 1");
    if (!(n_slope >= 0.0)) throw std::invalid_argument("outer budget must be non-decreasing");
    if (!(m_divisor >= 1.0)) throw std::invalid_argument("inner budget divisor must be >= 1");
    if (k_batches < 1) throw std::invalid_argument("batch count must be >= 1");
  }

  int n_at(long t) const {
    const long n = std::llround(n0 + n_slope * static_cast<double>(t));
    return static_cast<int>(std::max(1L, n));
  }

  int m_at(long t) const {
    const long m = static_cast<long>(std::floor(static_cast<double>(n_at(t)) / m_divisor));
    return static_cast<int>(std::max(1L, m));
  }
};

}  // namespace bro
