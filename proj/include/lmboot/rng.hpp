#pragma once

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace lmboot {

/// Recorded in run metadata so outputs can be tied to the exact generator.
inline constexpr std::string_view rng_algorithm_id =
    "mt19937_64;seed-derive=splitmix64(splitmix64(base)^splitmix64(index+0x632BE59BD9B4E019));"
    "uniform=((x>>11)+0.5)*2^-53;normal=-sqrt2*erfc_inv(2u)";

/// SplitMix64 output function (Steele, Lea & Flood).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of child stream `index` under `base`. Children of distinct indices are
/// unrelated, so replications and resamples can be generated in any order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline double inverse_normal_cdf(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/**
 * Deterministic random stream.
 *
 * std::mt19937_64 is bit-specified by the standard; uniforms are built from the
 * top 53 bits and normals by inverse CDF, so every draw consumes exactly one
 * engine output and results are identical across platforms.
 */
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return inverse_normal_cdf(uniform()); }

  /// Uniform index on {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(i, n - 1);
  }

 private:
  std::mt19937_64 engine_;
};

/// The first n standard normal deviates of the stream seeded with `seed`.
inline std::vector<double> normal_deviates(std::uint64_t seed, std::size_t n) {
  Stream s(seed);
  std::vector<double> z(n);
  for (auto& v : z) v = s.normal();
  return z;
}

}  // namespace lmboot
