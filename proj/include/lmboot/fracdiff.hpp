#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace lmboot {

using Series = std::vector<double>;

/// Coefficients alpha_0..alpha_{n-1} of the binomial expansion of (1 - z)^d.
struct FracCoeffs {
  double d = 0.0;
  std::vector<double> coeffs;
};

namespace detail {

// Multiplicative recursion alpha_j = alpha_{j-1} (j - 1 - d) / j. Gamma ratios
// overflow near j = 170, the recursion does not.
inline std::vector<double> binomial_coeffs(double d, std::size_t n) {
  std::vector<double> a(n);
  if (n == 0) return a;
  a[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    const auto jd = static_cast<double>(j);
    a[j] = a[j - 1] * ((jd - 1.0 - d) / jd);
  }
  return a;
}

inline void check_frac_index(double d) {
  if (!(d > -1.0) || !std::isfinite(d))
    throw std::domain_error("fractional index must be finite and > -1");
}

// out(t) = sum_{j=0}^{t} a_j x(t-j); truncated at the sample start.
inline Series truncated_convolve(std::span<const double> a, std::span<const double> x) {
  Series out(x.size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= t; ++j) acc += a[j] * x[t - j];
    out[t] = acc;
  }
  return out;
}

}  // namespace detail

inline FracCoeffs frac_coeffs(double d, std::size_t n) {
  detail::check_frac_index(d);
  if (n == 0) throw std::domain_error("frac_coeffs: n must be positive");
  return {d, detail::binomial_coeffs(d, n)};
}

/**
 * Fractional difference w(t) = sum_{j=0}^{t-1} alpha_j^{(d)} y(t-j), using only
 * in-sample values. When `subtract_mean` is set the sample mean of y is removed
 * first (for data that is not known to be mean zero).
 */
inline Series frac_filter(std::span<const double> y, double d, bool subtract_mean = false) {
  detail::check_frac_index(d);
  if (y.empty()) throw std::invalid_argument("frac_filter: empty series");
  const auto a = detail::binomial_coeffs(d, y.size());
  if (!subtract_mean) return detail::truncated_convolve(a, y);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  Series centred(y.begin(), y.end());
  for (auto& v : centred) v -= mean;
  return detail::truncated_convolve(a, centred);
}

/// Truncated inverse filter (1 - z)^{-d}: y(t) = sum_{j=0}^{t-1} alpha_j^{(-d)} w(t-j).
inline Series frac_unfilter(std::span<const double> w, double d) {
  detail::check_frac_index(d);
  if (w.empty()) throw std::invalid_argument("frac_unfilter: empty series");
  const auto a = detail::binomial_coeffs(-d, w.size());
  return detail::truncated_convolve(a, w);
}

inline double fisher_z(double r) {
  if (!(std::abs(r) < 1.0)) throw std::domain_error("fisher_z: |r| must be < 1");
  return std::atanh(r);
}

/// tanh, held strictly inside (-1, 1); in double precision tanh rounds to +-1
/// once |zeta| exceeds about 19.
inline double fisher_z_inv(double zeta) {
  constexpr double edge = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(std::tanh(zeta), -edge, edge);
}

}  // namespace lmboot
