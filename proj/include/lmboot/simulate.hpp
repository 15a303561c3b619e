#pragma once

#include "lmboot/arfima.hpp"
#include "lmboot/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lmboot {

struct SimConfig {
  ArfimaSpec spec;
  std::size_t T = 0;
  std::uint64_t seed = 0;
};

/**
 * Exact sampler for a zero-mean stationary Gaussian process, built once from
 * gamma(0..T-1) by the Durbin-Levinson recursion:
 *
 *   y(t) = sum_{j=1}^{t} phi_{t,j} y(t-j) + sqrt(v_t) z(t),   y(0) = sqrt(gamma(0)) z(0).
 *
 * The prediction coefficients are stored (T^2/2 doubles) so repeated draws from
 * one model cost O(T^2) each without redoing the recursion.
 */
class GaussianSampler {
 public:
  explicit GaussianSampler(std::span<const double> gamma) : n_(gamma.size()) {
    if (n_ == 0) throw std::invalid_argument("GaussianSampler: empty autocovariance");
    sd_.resize(n_);
    offset_.resize(n_);
    std::vector<double> prev, cur;
    double v = gamma[0];
    if (!(v > 0.0)) throw std::domain_error("GaussianSampler: gamma(0) must be positive");
    sd_[0] = std::sqrt(v);
    for (std::size_t t = 1; t < n_; ++t) {
      double acc = gamma[t];
      for (std::size_t j = 1; j < t; ++j) acc -= prev[j - 1] * gamma[t - j];
      const double k = acc / v;
      cur.assign(t, 0.0);
      for (std::size_t j = 1; j < t; ++j) cur[j - 1] = prev[j - 1] - k * prev[t - j - 1];
      cur[t - 1] = k;
      v *= 1.0 - k * k;
      if (!(v > 0.0))
        throw std::domain_error("GaussianSampler: autocovariance is not positive definite");
      offset_[t] = coeffs_.size();
      coeffs_.insert(coeffs_.end(), cur.begin(), cur.end());
      sd_[t] = std::sqrt(v);
      prev.swap(cur);
    }
  }

  [[nodiscard]] std::size_t size() const { return n_; }

  /// The linear map z -> y.
  [[nodiscard]] std::vector<double> transform(std::span<const double> z) const {
    if (z.size() != n_) throw std::invalid_argument("GaussianSampler: wrong number of deviates");
    std::vector<double> y(n_);
    y[0] = sd_[0] * z[0];
    for (std::size_t t = 1; t < n_; ++t) {
      const double* c = coeffs_.data() + offset_[t];
      double acc = 0.0;
      for (std::size_t j = 1; j <= t; ++j) acc += c[j - 1] * y[t - j];
      y[t] = acc + sd_[t] * z[t];
    }
    return y;
  }

  [[nodiscard]] std::vector<double> draw(std::uint64_t seed) const { return transform(normal_deviates(seed, n_)); }

 private:
  std::size_t n_;
  std::vector<double> sd_;
  std::vector<std::size_t> offset_;
  std::vector<double> coeffs_;
};

inline std::vector<double> simulate_gaussian(const SimConfig& config) {
  if (config.T < 2) throw std::invalid_argument("simulate_gaussian: T must be at least 2");
  const auto gamma = acvf(config.spec, config.T - 1);
  return GaussianSampler(gamma).draw(config.seed);
}

}  // namespace lmboot
