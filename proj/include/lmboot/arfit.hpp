#pragma once

#include "lmboot/fracdiff.hpp"

#include <unsupported/Eigen/Polynomials>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/**
 * Autoregressive approximation.
 *
 * Coefficients follow the convention Phi_h(z) = 1 + phi(1) z + ... + phi(h) z^h,
 * so the prediction error is e(t) = sum_{j=0}^{h} phi(j) y(t-j) with phi(0) = 1.
 * An AR(1) with positive dependence y(t) = 0.6 y(t-1) + e(t) has phi(1) = -0.6.
 */
namespace lmboot {

enum class FitMethod { burg, yule_walker };
enum class OrderRule { aic, fixed_log_sq };

inline std::string_view to_string(FitMethod m) { return m == FitMethod::burg ? "burg" : "yule_walker"; }
inline std::string_view to_string(OrderRule r) { return r == OrderRule::aic ? "aic" : "logsq"; }

struct ArModel {
  std::vector<double> phi;  ///< phi(1..h)
  double sigma2 = 1.0;      ///< innovation (prediction error) variance
  FitMethod method = FitMethod::burg;

  [[nodiscard]] std::size_t order() const { return phi.size(); }
};

/// Every model of order 0..max_order from one nested recursion.
struct ArFitPath {
  std::vector<std::vector<double>> phi;  ///< phi[h] has h entries
  std::vector<double> sigma2;            ///< sigma2[h]
  double mean = 0.0;
  FitMethod method = FitMethod::burg;

  [[nodiscard]] ArModel model(std::size_t h) const { return {phi.at(h), sigma2.at(h), method}; }
};

namespace detail {

inline double mean_of(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v;
  return s / static_cast<double>(y.size());
}

// phi^{(m)}_j = phi^{(m-1)}_j + k phi^{(m-1)}_{m-j},  phi^{(m)}_m = k
inline std::vector<double> step_up(const std::vector<double>& prev, double k) {
  const std::size_t m = prev.size() + 1;
  std::vector<double> next(m);
  for (std::size_t j = 0; j + 1 < m; ++j) next[j] = prev[j] + k * prev[m - 2 - j];
  next[m - 1] = k;
  return next;
}

inline ArFitPath burg_path(std::span<const double> x, std::size_t max_order, double mean) {
  const std::size_t n = x.size();
  ArFitPath path;
  path.mean = mean;
  path.method = FitMethod::burg;
  std::vector<double> f(n), b(n);
  double s0 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    f[t] = b[t] = x[t] - mean;
    s0 += f[t] * f[t];
  }
  s0 /= static_cast<double>(n);
  path.phi.emplace_back();
  path.sigma2.push_back(s0);

  for (std::size_t m = 1; m <= max_order; ++m) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = m; t < n; ++t) {
      num += f[t] * b[t - 1];
      den += f[t] * f[t] + b[t - 1] * b[t - 1];
    }
    const double k = den > 0.0 ? -2.0 * num / den : 0.0;
    for (std::size_t t = n - 1; t >= m; --t) {
      const double ft = f[t];
      f[t] = ft + k * b[t - 1];
      b[t] = b[t - 1] + k * ft;
    }
    path.phi.push_back(step_up(path.phi.back(), k));
    path.sigma2.push_back(path.sigma2.back() * (1.0 - k * k));
  }
  return path;
}

// Levinson-Durbin on autocovariances c(0..max_order).
inline ArFitPath levinson_path(std::span<const double> c, std::size_t max_order) {
  ArFitPath path;
  path.method = FitMethod::yule_walker;
  path.phi.emplace_back();
  path.sigma2.push_back(c[0]);
  for (std::size_t m = 1; m <= max_order; ++m) {
    const auto& a = path.phi.back();
    double acc = c[m];
    for (std::size_t j = 1; j < m; ++j) acc += a[j - 1] * c[m - j];
    const double k = -acc / path.sigma2.back();
    path.phi.push_back(step_up(a, k));
    path.sigma2.push_back(path.sigma2.back() * (1.0 - k * k));
  }
  return path;
}

}  // namespace detail

/// Biased (divisor T) mean-corrected sample autocovariances c(0..max_lag).
inline std::vector<double> sample_autocovariances(std::span<const double> y, std::size_t max_lag) {
  const std::size_t n = y.size();
  const double mean = detail::mean_of(y);
  std::vector<double> c(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag && k < n; ++k) {
    double acc = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) acc += (y[t] - mean) * (y[t + k] - mean);
    c[k] = acc / static_cast<double>(n);
  }
  return c;
}

/**
 * Fit AR models of every order up to `max_order`.
 *
 * Burg runs the forward/backward lattice recursion and always yields reflection
 * coefficients inside [-1, 1]. Yule-Walker solves the Toeplitz system of biased
 * sample autocovariances by Levinson-Durbin. Both are mean-corrected.
 */
inline ArFitPath fit_ar_path(std::span<const double> y, std::size_t max_order,
                             FitMethod method = FitMethod::burg) {
  if (max_order >= y.size()) throw std::invalid_argument("fit_ar: order must be below the sample size");
  const double mean = detail::mean_of(y);
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  if (!(ss > 0.0)) throw std::invalid_argument("fit_ar: series has zero sample variance");

  if (method == FitMethod::burg) return detail::burg_path(y, max_order, mean);
  auto path = detail::levinson_path(sample_autocovariances(y, max_order), max_order);
  path.mean = mean;
  return path;
}

inline ArModel fit_ar(std::span<const double> y, std::size_t h, FitMethod method = FitMethod::burg) {
  return fit_ar_path(y, h, method).model(h);
}

/// Yule-Walker solution for a known autocovariance sequence acvf(0..order).
inline ArModel levinson_durbin(std::span<const double> acvf, std::size_t order) {
  if (acvf.size() <= order) throw std::invalid_argument("levinson_durbin: need acvf(0..order)");
  if (!(acvf[0] > 0.0)) throw std::invalid_argument("levinson_durbin: acvf(0) must be positive");
  return detail::levinson_path(acvf, order).model(order);
}

/// argmin_{h} ln(sigma2[h]) + 2h/T; ties go to the smaller order.
inline std::size_t aic_argmin(std::span<const double> sigma2, std::size_t T) {
  std::size_t best = 0;
  double best_value = std::log(sigma2[0]);
  for (std::size_t h = 1; h < sigma2.size(); ++h) {
    const double v = std::log(sigma2[h]) + 2.0 * static_cast<double>(h) / static_cast<double>(T);
    if (v < best_value) {
      best_value = v;
      best = h;
    }
  }
  return best;
}

inline std::size_t select_order_aic(std::span<const double> y, std::size_t max_h,
                                    FitMethod method = FitMethod::burg) {
  const auto path = fit_ar_path(y, max_h, method);
  return aic_argmin(path.sigma2, y.size());
}

/// [(ln T)^2], floored.
inline std::size_t max_order(std::size_t T) {
  if (T == 0) throw std::invalid_argument("max_order: T must be positive");
  const double l = std::log(static_cast<double>(T));
  return static_cast<std::size_t>(std::floor(l * l));
}

inline std::size_t order_for_rule(std::span<const double> y, OrderRule rule,
                                  FitMethod method = FitMethod::burg) {
  const std::size_t cap = std::min(max_order(y.size()), y.size() - 1);
  return rule == OrderRule::aic ? select_order_aic(y, cap, method) : cap;
}

/// psi(0..max_lag) of Phi_h(z)^{-1}.
inline std::vector<double> ar_to_irf(std::span<const double> phi, std::size_t max_lag) {
  std::vector<double> psi(max_lag + 1, 0.0);
  psi[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= std::min(k, phi.size()); ++j) acc -= phi[j - 1] * psi[k - j];
    psi[k] = acc;
  }
  return psi;
}

inline std::vector<double> ar_to_irf(const ArModel& model, std::size_t max_lag) {
  return ar_to_irf(model.phi, max_lag);
}

/**
 * Step-down (Schur-Cohn) recursion. Returns the reflection coefficients
 * k_1..k_h together with every lower-order coefficient vector, or nullopt
 * when some |k_m| >= 1, i.e. Phi has a zero on or inside the unit circle.
 */
struct StepDown {
  std::vector<double> reflection;
  std::vector<std::vector<double>> phi;  ///< phi[m] is the order-m polynomial
};

inline std::optional<StepDown> step_down(std::span<const double> phi) {
  const std::size_t h = phi.size();
  StepDown out;
  out.reflection.assign(h, 0.0);
  out.phi.resize(h + 1);
  out.phi[h].assign(phi.begin(), phi.end());
  for (std::size_t m = h; m >= 1; --m) {
    const auto& a = out.phi[m];
    const double k = a[m - 1];
    if (!(std::abs(k) < 1.0)) return std::nullopt;
    out.reflection[m - 1] = k;
    const double scale = 1.0 - k * k;
    std::vector<double> lower(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) lower[j] = (a[j] - k * a[m - 2 - j]) / scale;
    out.phi[m - 1] = std::move(lower);
  }
  return out;
}

inline bool schur_cohn_stable(std::span<const double> phi) {
  for (double v : phi)
    if (!std::isfinite(v)) return false;
  return step_down(phi).has_value();
}

/// Autocovariances gamma(0..max_lag) implied by a stable AR model.
inline std::vector<double> ar_to_acvf(std::span<const double> phi, double sigma2, std::size_t max_lag) {
  const auto sd = step_down(phi);
  if (!sd) throw std::domain_error("ar_to_acvf: AR operator is not stationary");
  const std::size_t h = phi.size();
  std::vector<double> rho(std::max(max_lag, h) + 1, 0.0);
  rho[0] = 1.0;
  double gain = 1.0;
  for (std::size_t m = 1; m <= h; ++m) {
    const auto& a = sd->phi[m];
    double acc = 0.0;
    for (std::size_t j = 1; j <= m; ++j) acc -= a[j - 1] * rho[m - j];
    rho[m] = acc;
    gain *= 1.0 - sd->reflection[m - 1] * sd->reflection[m - 1];
  }
  for (std::size_t k = h + 1; k < rho.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= h; ++j) acc -= phi[j - 1] * rho[k - j];
    rho[k] = acc;
  }
  const double gamma0 = sigma2 / gain;
  rho.resize(max_lag + 1);
  for (auto& v : rho) v *= gamma0;
  return rho;
}

inline std::vector<double> ar_to_acvf(const ArModel& model, std::size_t max_lag) {
  return ar_to_acvf(model.phi, model.sigma2, max_lag);
}

/// Yule-Walker implied autocorrelations; rho(0) = 1.
inline std::vector<double> ar_to_acf(std::span<const double> phi, std::size_t max_lag) {
  auto g = ar_to_acvf(phi, 1.0, max_lag);
  const double g0 = g[0];
  for (auto& v : g) v /= g0;
  g[0] = 1.0;
  return g;
}

inline std::vector<double> ar_to_acf(const ArModel& model, std::size_t max_lag) {
  return ar_to_acf(model.phi, max_lag);
}

/**
 * Move every zero of Phi(z) lying on or inside the unit circle (|r| <= 1 + 1e-10)
 * to its mirror image 1/conj(r). Mirror images that would still sit within
 * `min_modulus` of the circle are pushed out to modulus `min_modulus`.
 * Stable input is returned unchanged.
 */
inline std::vector<double> reflect_to_stationary(std::span<const double> phi, double min_modulus = 1.0 + 1e-6) {
  if (schur_cohn_stable(phi)) return {phi.begin(), phi.end()};
  std::size_t degree = phi.size();
  while (degree > 0 && phi[degree - 1] == 0.0) --degree;

  Eigen::VectorXd poly(degree + 1);
  poly[0] = 1.0;
  for (std::size_t j = 0; j < degree; ++j) poly[static_cast<Eigen::Index>(j + 1)] = phi[j];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(poly);

  constexpr double eps = 1e-10;
  std::vector<std::complex<double>> product{1.0};
  for (auto r : solver.roots()) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || std::abs(r) == 0.0)
      throw std::runtime_error("reflect_to_stationary: root finding failed");
    if (std::abs(r) <= 1.0 + eps) {
      r = 1.0 / std::conj(r);
      if (std::abs(r) < min_modulus) r *= min_modulus / std::abs(r);
    }
    // multiply by (1 - z / r)
    std::vector<std::complex<double>> next(product.size() + 1, 0.0);
    for (std::size_t j = 0; j < product.size(); ++j) {
      next[j] += product[j];
      next[j + 1] -= product[j] / r;
    }
    product = std::move(next);
  }
  std::vector<double> out(phi.size(), 0.0);
  for (std::size_t j = 1; j < product.size(); ++j) out[j - 1] = product[j].real();
  if (!schur_cohn_stable(out)) throw std::runtime_error("reflect_to_stationary: repair did not converge");
  return out;
}

/**
 * e(t) = sum_{j=0}^{h} phi(j) w(t-j), t = 1..T. With `circular` set the
 * presample values are wrapped, w(1-j) = w(T-j+1); otherwise they are zero.
 */
inline std::vector<double> ar_residuals(std::span<const double> w, std::span<const double> phi, bool circular = true) {
  const std::size_t n = w.size();
  const std::size_t h = phi.size();
  std::vector<double> e(n);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = w[t];
    for (std::size_t j = 1; j <= h; ++j) {
      if (j <= t) {
        acc += phi[j - 1] * w[t - j];
      } else if (circular) {
        acc += phi[j - 1] * w[(t + n - (j % n)) % n];
      }
    }
    e[t] = acc;
  }
  return e;
}

}  // namespace lmboot
