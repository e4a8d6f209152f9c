#pragma once

#include <cstdint>
#include <cmath>
#include <limits>

namespace bro {

/// Small-state counter-style generator (splitmix64). One 64-bit word of
/// state makes per-substream construction essentially free, which matters
/// when every (outer, inner) replication gets its own stream.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Hierarchical substream handle. A stream is identified by a single 64-bit
/// key; child(k) derives the key of the k-th substream by hashing, so the
/// whole randomness tree (command -> replication -> iteration -> outer i ->
/// inner j) is a pure function of the master seed and the path of indices.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ 0x7f4a7c15f39cc060ULL)) {}

  RngStream child(std::uint64_t index) const {
    RngStream s;
    s.key_ = mix(key_ + 0x9e3779b97f4a7c15ULL * (index + 1));
    return s;
  }

  SplitMix64 engine() const { return SplitMix64(key_); }

  std::uint64_t key() const { return key_; }

 private:
  RngStream() : key_(0) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

/// Uniform draw in [0, 1) with 53 random mantissa bits.
template <class Engine>
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform draw in (lo, hi).
template <class Engine>
inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

namespace detail {
// Rational approximation to the standard normal quantile (Acklam).
// Relative error below 1.2e-9 over (0,1); adequate for simulation draws.
double normal_quantile_approx(double p);
}  // namespace detail

/// Standard normal draw by inversion; exactly one engine call per draw
/// keeps substreams aligned regardless of the values drawn.
template <class Engine>
inline double standard_normal(Engine& eng) {
  double u = uniform01(eng);
  if (u <= 0.0) u = 0x1.0p-53;
  return detail::normal_quantile_approx(u);
}

template <class Engine>
inline double normal(Engine& eng, double mean, double stddev) {
  return mean + stddev * standard_normal(eng);
}

namespace detail {

/// 256-layer ziggurat tables for the unit exponential (Marsaglia-Tsang
/// layout with 53-bit draws).
struct ExpZiggurat {
  static constexpr double r = 7.69711747013104972;
  static constexpr double v = 0.0039496598225815571993;
  std::uint64_t ke[256];
  double we[256];
  double fe[256];

  ExpZiggurat() {
    const double m = 9007199254740992.0;  // 2^53
    double de = r;
    double te = r;
    const double q = v / std::exp(-de);
    ke[0] = static_cast<std::uint64_t>((de / q) * m);
    ke[1] = 0;
    we[0] = q / m;
    we[255] = de / m;
    fe[0] = 1.0;
    fe[255] = std::exp(-de);
    for (int i = 254; i >= 1; --i) {
      de = -std::log(v / de + std::exp(-de));
      ke[i + 1] = static_cast<std::uint64_t>((de / te) * m);
      te = de;
      fe[i] = std::exp(-de);
      we[i] = de / m;
    }
  }
};

inline const ExpZiggurat& exp_ziggurat() {
  static const ExpZiggurat tables;
  return tables;
}

}  // namespace detail

/// Unit-rate exponential draw (ziggurat; exact distribution, no log on the
/// fast path).
template <class Engine>
inline double unit_exponential(Engine& eng) {
  const detail::ExpZiggurat& z = detail::exp_ziggurat();
  for (;;) {
    std::uint64_t ri = eng() >> 3;
    const std::size_t idx = ri & 0xFF;
    ri >>= 8;
    const double x = static_cast<double>(ri) * z.we[idx];
    if (ri < z.ke[idx]) return x;
    if (idx == 0) {
      double u = uniform01(eng);
      if (u <= 0.0) u = 0x1.0p-53;
      return detail::ExpZiggurat::r - std::log(u);
    }
    if ((z.fe[idx - 1] - z.fe[idx]) * uniform01(eng) + z.fe[idx] < std::exp(-x)) return x;
  }
}

}  // namespace bro
