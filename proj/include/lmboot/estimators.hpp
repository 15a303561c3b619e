#pragma once

#include "lmboot/arfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace lmboot {

enum class StatKind { acf, irf };

inline std::string_view to_string(StatKind k) { return k == StatKind::acf ? "acf" : "irf"; }

struct StatRequest {
  StatKind kind = StatKind::irf;
  std::vector<std::size_t> lags;
  OrderRule order_rule = OrderRule::fixed_log_sq;
};

namespace detail {

inline void check_lags(std::span<const std::size_t> lags, std::size_t T) {
  for (auto k : lags)
    if (k >= T) throw std::invalid_argument("lag must be at most T-1");
}

}  // namespace detail

/**
 * Pearson sample autocorrelations
 *   rho(k) = sum_{t=1}^{T-k} (y(t)-ybar)(y(t+k)-ybar) / sum_{t=1}^{T} (y(t)-ybar)^2
 * with the full-sample mean in both factors.
 */
inline std::vector<double> sample_acf(std::span<const double> y, std::span<const std::size_t> lags) {
  const std::size_t n = y.size();
  detail::check_lags(lags, n);
  const double mean = detail::mean_of(y);
  std::vector<double> x(n);
  double den = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = y[t] - mean;
    den += x[t] * x[t];
  }
  if (!(den > 0.0)) throw std::invalid_argument("sample_acf: series has zero sample variance");
  std::vector<double> r(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::size_t k = lags[i];
    if (k == 0) {
      r[i] = 1.0;
      continue;
    }
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) num += x[t] * x[t + k];
    r[i] = num / den;
  }
  return r;
}

/// r(k) = C(k)/C(0) with segment means over y(1..T-k) and y(k+1..T), divisors T-k and T.
inline std::vector<double> sample_acf_lk(std::span<const double> y, std::span<const std::size_t> lags) {
  const std::size_t n = y.size();
  detail::check_lags(lags, n);
  const double mean = detail::mean_of(y);
  double c0 = 0.0;
  for (double v : y) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0)) throw std::invalid_argument("sample_acf_lk: series has zero sample variance");
  std::vector<double> r(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::size_t k = lags[i];
    const std::size_t m = n - k;
    double head = 0.0, tail = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      head += y[t];
      tail += y[t + k];
    }
    head /= static_cast<double>(m);
    tail /= static_cast<double>(m);
    double ck = 0.0;
    for (std::size_t t = 0; t < m; ++t) ck += (y[t] - head) * (y[t + k] - tail);
    r[i] = ck / static_cast<double>(m) / c0;
  }
  return r;
}

/// Semi-parametric impulse responses: fit AR(h) under `rule`, invert Phi_h(z).
inline std::vector<double> sample_irf(std::span<const double> y, OrderRule rule, std::span<const std::size_t> lags,
                                      FitMethod method = FitMethod::burg) {
  detail::check_lags(lags, y.size());
  const std::size_t cap = std::min(max_order(y.size()), y.size() - 1);
  const auto path = fit_ar_path(y, cap, method);
  const std::size_t h = rule == OrderRule::aic ? aic_argmin(path.sigma2, y.size()) : cap;
  const std::size_t top = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
  const auto psi = ar_to_irf(path.phi[h], top);
  std::vector<double> out(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) out[i] = psi[lags[i]];
  return out;
}

/// Sample ACF or semi-parametric IRF at the requested lags.
inline std::vector<double> statistic(std::span<const double> y, const StatRequest& request,
                                     FitMethod method = FitMethod::burg) {
  return request.kind == StatKind::acf ? sample_acf(y, request.lags)
                                       : sample_irf(y, request.order_rule, request.lags, method);
}

struct SplwEstimate {
  double d_hat = 0.0;
  std::size_t bandwidth = 0;
  double objective_value = 0.0;
};

inline constexpr double splw_lower = -0.499;
inline constexpr double splw_upper = 0.499;

/// floor(T^0.65), kept inside 1 <= N < T/2.
inline std::size_t default_splw_bandwidth(std::size_t T, double exponent = 0.65) {
  auto n = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(T), exponent)));
  const std::size_t limit = (T + 1) / 2 - 1;  // largest N with N < T/2
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(limit, 1));
}

/// Mean-corrected, untapered periodogram I(lambda_j) = |sum_t x(t) e^{-i t lambda_j}|^2 / (2 pi T).
inline std::vector<double> periodogram(std::span<const double> y, std::size_t n_freq) {
  const std::size_t T = y.size();
  const double mean = detail::mean_of(y);
  std::vector<double> out(n_freq);
  for (std::size_t j = 1; j <= n_freq; ++j) {
    const double lambda = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(T);
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double x = y[t] - mean;
      const double a = lambda * static_cast<double>(t);
      re += x * std::cos(a);
      im -= x * std::sin(a);
    }
    out[j - 1] = (re * re + im * im) / (2.0 * std::numbers::pi * static_cast<double>(T));
  }
  return out;
}

namespace detail {

inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-9) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/**
 * Local Whittle ("semi-parametric Gaussian") estimate of d from the lowest N
 * Fourier frequencies, minimising
 *   R(d) = ln( N^{-1} sum_j lambda_j^{2d} I(lambda_j) ) - 2d N^{-1} sum_j ln lambda_j
 * over [-0.499, 0.499]: a coarse grid locates the basin, golden section refines it.
 */
inline SplwEstimate splw(std::span<const double> y, std::size_t bandwidth, std::size_t grid_points = 201) {
  const std::size_t T = y.size();
  if (bandwidth < 1 || 2 * bandwidth >= T) throw std::invalid_argument("splw: bandwidth must satisfy 1 <= N < T/2");
  const auto I = periodogram(y, bandwidth);
  std::vector<double> log_lambda(bandwidth);
  double mean_log = 0.0;
  for (std::size_t j = 0; j < bandwidth; ++j) {
    if (!(I[j] > 1e-300)) throw std::domain_error("splw: zero periodogram ordinate");
    log_lambda[j] = std::log(2.0 * std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(T));
    mean_log += log_lambda[j];
  }
  mean_log /= static_cast<double>(bandwidth);

  const std::function<double(double)> objective = [&](double d) {
    double s = 0.0;
    for (std::size_t j = 0; j < bandwidth; ++j) s += std::exp(2.0 * d * log_lambda[j]) * I[j];
    return std::log(s / static_cast<double>(bandwidth)) - 2.0 * d * mean_log;
  };

  const double step = (splw_upper - splw_lower) / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_value = objective(splw_lower);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double v = objective(splw_lower + step * static_cast<double>(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double centre = splw_lower + step * static_cast<double>(best);
  const double lo = std::max(splw_lower, centre - step);
  const double hi = std::min(splw_upper, centre + step);
  double d_hat = detail::golden_section(objective, lo, hi);
  double value = objective(d_hat);
  if (best_value < value) {
    d_hat = centre;
    value = best_value;
  }
  return {d_hat, bandwidth, value};
}

inline SplwEstimate splw(std::span<const double> y) { return splw(y, default_splw_bandwidth(y.size())); }

}  // namespace lmboot
