#include "bro/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bro/rng.hpp"

namespace bro {

namespace {

// Linear interpolation of the empirical quantile function at level u.
double interp_quantile(const std::vector<double>& sorted, double u) {
  const double pos = u * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double wasserstein_1d(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::domain_error("wasserstein_1d needs non-empty samples");
  }
  std::vector<double> sa(a), sb(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  if (sa.size() == sb.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) sum += std::abs(sa[i] - sb[i]);
    return sum / static_cast<double>(sa.size());
  }

  const std::size_t k = std::min(sa.size(), sb.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
    sum += std::abs(interp_quantile(sa, u) - interp_quantile(sb, u));
  }
  return sum / static_cast<double>(k);
}

ChainConvergenceReport chain_convergence_report(const std::vector<double>& chain,
                                                std::size_t subset_size,
                                                std::uint64_t pairing_seed) {
  if (subset_size == 0 || chain.size() < 2 * subset_size) {
    throw std::domain_error("chain too short for the requested subset size");
  }
  const std::size_t blocks = chain.size() / subset_size;

  std::vector<std::vector<double>> block(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    block[b].assign(chain.begin() + static_cast<std::ptrdiff_t>(b * subset_size),
                    chain.begin() + static_cast<std::ptrdiff_t>((b + 1) * subset_size));
  }

  ChainConvergenceReport report;
  double consec_sum = 0.0;
  for (std::size_t b = 0; b + 1 < blocks; ++b) {
    const double d = wasserstein_1d(block[b], block[b + 1]);
    report.consecutive.push_back({b, b + 1, d});
    consec_sum += d;
  }
  report.mean_consecutive = consec_sum / static_cast<double>(report.consecutive.size());

  SplitMix64 eng = RngStream(pairing_seed).engine();
  const std::size_t pairs = blocks - 1;
  double arb_sum = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    std::size_t i = 0, j = 0;
    if (blocks < 3) {
      i = 0;
      j = 1;
    } else {
      do {
        i = static_cast<std::size_t>(uniform01(eng) * static_cast<double>(blocks));
        j = static_cast<std::size_t>(uniform01(eng) * static_cast<double>(blocks));
      } while (i >= blocks || j >= blocks || (i > j ? i - j : j - i) < 2);
    }
    const double d = wasserstein_1d(block[i], block[j]);
    report.arbitrary.push_back({i, j, d});
    arb_sum += d;
  }
  report.mean_arbitrary = arb_sum / static_cast<double>(report.arbitrary.size());

  report.converged = std::abs(report.mean_arbitrary - report.mean_consecutive) <=
                     0.5 * report.mean_consecutive;
  return report;
}

}  // namespace bro
