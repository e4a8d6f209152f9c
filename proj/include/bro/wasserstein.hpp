#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace bro {

/// Wasserstein-1 distance between two empirical distributions. Equal-length
/// inputs use the exact form (mean absolute difference of sorted samples);
/// otherwise both quantile functions are linearly interpolated at
/// min(|a|,|b|) evenly spaced levels.
double wasserstein_1d(const std::vector<double>& a, const std::vector<double>& b);

/// One compared pair of chain blocks and their W1 distance.
struct SubsetDistance {
  std::size_t first = 0;
  std::size_t second = 0;
  double distance = 0.0;
};

/// Stationarity diagnostic over equal blocks of an MCMC chain: if the chain
/// has settled, the distance between far-apart blocks looks the same as the
/// distance between neighbouring ones.
struct ChainConvergenceReport {
  std::vector<SubsetDistance> consecutive;
  std::vector<SubsetDistance> arbitrary;
  double mean_consecutive = 0.0;
  double mean_arbitrary = 0.0;
  bool converged = false;  // relative gap between the two means below 50%
};

ChainConvergenceReport chain_convergence_report(const std::vector<double>& chain,
                                                std::size_t subset_size,
                                                std::uint64_t pairing_seed = 0);

}  // namespace bro
