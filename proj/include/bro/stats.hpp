#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace bro {

double normal_pdf(double z);
double normal_cdf(double z);

/// Standard normal quantile, refined to near machine precision with one
/// Halley step on the CDF. Use this for analytical values; the simulation
/// path uses the cheaper unrefined approximation in rng.hpp.
double normal_quantile(double p);

/// Streaming mean/variance accumulator (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const {  // sample variance, n-1 denominator
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double stddev() const;
  double std_error() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double mean_of(const std::vector<double>& xs);
double variance_of(const std::vector<double>& xs);  // n-1 denominator
double stddev_of(const std::vector<double>& xs);

}  // namespace bro
