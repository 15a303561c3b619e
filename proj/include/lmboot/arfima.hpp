#pragma once

#include "lmboot/arfit.hpp"
#include "lmboot/fracdiff.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lmboot {

/**
 * Gaussian ARFIMA(p, d, 0): (1 - z)^d Phi(z) y(t) = e(t), e ~ WN(0, sigma2).
 *
 * `ar` holds phi_1..phi_p of Phi(z) = 1 - phi_1 z - ... - phi_p z^p, the usual
 * data-generating sign convention (the negative of ArModel::phi).
 */
struct ArfimaSpec {
  double d = 0.0;
  std::vector<double> ar;
  double sigma2 = 1.0;

  /// Phi in the ArModel convention 1 + a_1 z + ...
  [[nodiscard]] std::vector<double> ar_polynomial() const {
    std::vector<double> a(ar.size());
    for (std::size_t j = 0; j < ar.size(); ++j) a[j] = -ar[j];
    return a;
  }

  void validate() const {
    if (!(std::abs(d) < 0.5)) throw std::domain_error("ArfimaSpec: |d| must be < 0.5");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::domain_error("ArfimaSpec: sigma2 must be positive");
    if (!schur_cohn_stable(ar_polynomial()))
      throw std::domain_error("ArfimaSpec: AR operator has a zero on or inside the unit circle");
  }
};

/// Spec for an AR(h) sieve fitted to data pre-filtered by (1 - z)^d.
inline ArfimaSpec arfima_from_ar(double d, const ArModel& model) {
  ArfimaSpec spec{d, {}, model.sigma2};
  spec.ar.resize(model.phi.size());
  for (std::size_t j = 0; j < model.phi.size(); ++j) spec.ar[j] = -model.phi[j];
  return spec;
}

/// log|Gamma(x)| together with the sign of Gamma(x).
struct SignedLogGamma {
  double log_abs;
  int sign;
};

inline SignedLogGamma signed_lgamma(double x) {
  int sign = 1;
  const double v = boost::math::lgamma(x, &sign);
  return {v, sign};
}

/**
 * Fractional noise autocovariances
 *   gamma(k) = sigma2 Gamma(1-2d) Gamma(k+d) / (Gamma(d) Gamma(1-d) Gamma(k+1-d)),
 * with gamma(0) = sigma2 Gamma(1-2d) / Gamma(1-d)^2 taken in log space and the
 * remaining lags by gamma(k) = gamma(k-1) (k-1+d) / (k-d).
 */
inline std::vector<double> fractional_noise_acvf(double d, double sigma2, std::size_t max_lag) {
  if (!(std::abs(d) < 0.5)) throw std::domain_error("fractional_noise_acvf: |d| must be < 0.5");
  const auto num = signed_lgamma(1.0 - 2.0 * d);
  const auto den = signed_lgamma(1.0 - d);
  std::vector<double> g(max_lag + 1);
  g[0] = sigma2 * num.sign * std::exp(num.log_abs - 2.0 * den.log_abs);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    const auto kd = static_cast<double>(k);
    g[k] = g[k - 1] * (kd - 1.0 + d) / (kd - d);
  }
  return g;
}

namespace detail {

/**
 * ARFIMA(1, d, 0) by Sowell's hypergeometric representation. With
 * G(k) = 2F1(k+d, 1; k+1-d; phi) = sum_n phi^n gamma_u(k+n) / gamma_u(k) and
 * gamma_u the fractional noise autocovariances,
 *
 *   (1 - phi^2) gamma(k) = sum_{m=0}^{k} phi^m gamma_u(k-m)
 *                          + gamma_u(k) (G(k) - 1) + phi^k gamma_u(0) (G(0) - 1).
 *
 * G(max_lag) is summed directly; smaller k use the backward recursion
 * G(k) = 1 + phi (k+d)/(k+1-d) G(k+1), which damps rounding error for |phi| < 1.
 * This arrangement has no 1/phi factor, so phi -> 0 is regular.
 */
inline std::vector<double> sowell_ar1_acvf(double d, double phi, double sigma2, std::size_t max_lag) {
  const auto gu = fractional_noise_acvf(d, sigma2, max_lag);
  const auto K = static_cast<double>(max_lag);

  const std::size_t budget = 10 * max_lag + 1000;
  constexpr double tol = 1e-12;
  double term = 1.0, top = 1.0;
  bool converged = phi == 0.0;
  for (std::size_t n = 0; n < budget && !converged; ++n) {
    const auto nd = static_cast<double>(n);
    term *= phi * (K + d + nd) / (K + 1.0 - d + nd);
    top += term;
    converged = std::abs(term) <= tol * std::abs(top);
  }
  if (!converged) throw std::runtime_error("sowell_ar1_acvf: hypergeometric series did not converge");

  std::vector<double> G(max_lag + 1);
  G[max_lag] = top;
  for (std::size_t k = max_lag; k-- > 0;) {
    const auto kd = static_cast<double>(k);
    G[k] = 1.0 + phi * (kd + d) / (kd + 1.0 - d) * G[k + 1];
  }

  std::vector<double> g(max_lag + 1);
  const double scale = 1.0 / (1.0 - phi * phi);
  double partial = 0.0;  // sum_{m=0}^{k} phi^m gamma_u(k-m)
  double phik = 1.0;
  for (std::size_t k = 0; k <= max_lag; ++k) {
    partial = gu[k] + phi * partial;
    g[k] = scale * (partial + gu[k] * (G[k] - 1.0) + phik * gu[0] * (G[0] - 1.0));
    phik *= phi;
  }
  return g;
}

/**
 * General ARFIMA(p, d, 0): gamma(k) = sum_m c(m) gamma_u(k - m), where c is the
 * autocovariance of the unit-variance AR(p) part. c decays geometrically, so the
 * two-sided sum is cut once 2p + 1 consecutive |c(m)| fall below 1e-15 c(0).
 */
inline std::vector<double> convolution_acvf(double d, std::span<const double> phi_poly, double sigma2,
                                            std::size_t max_lag, std::size_t budget = 2000000) {
  const std::size_t p = phi_poly.size();
  auto c = ar_to_acvf(phi_poly, 1.0, p);
  constexpr double tol = 1e-15;
  std::size_t quiet = 0;
  while (quiet <= 2 * p) {
    if (c.size() > budget) throw std::runtime_error("convolution_acvf: AR autocovariances did not decay");
    const std::size_t k = c.size();
    double acc = 0.0;
    for (std::size_t j = 1; j <= p; ++j) acc -= phi_poly[j - 1] * c[k - j];
    c.push_back(acc);
    quiet = std::abs(acc) <= tol * c[0] ? quiet + 1 : 0;
  }
  const std::size_t M = c.size() - 1;
  const auto gu = fractional_noise_acvf(d, sigma2, max_lag + M);
  std::vector<double> g(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double acc = c[0] * gu[k];
    for (std::size_t m = 1; m <= M; ++m) {
      const std::size_t below = k >= m ? k - m : m - k;
      acc += c[m] * (gu[below] + gu[k + m]);
    }
    g[k] = acc;
  }
  return g;
}

}  // namespace detail

/// Exact autocovariances gamma(0..max_lag).
inline std::vector<double> acvf(const ArfimaSpec& spec, std::size_t max_lag) {
  spec.validate();
  if (spec.ar.empty()) return fractional_noise_acvf(spec.d, spec.sigma2, max_lag);
  if (spec.ar.size() == 1) return detail::sowell_ar1_acvf(spec.d, spec.ar[0], spec.sigma2, max_lag);
  return detail::convolution_acvf(spec.d, spec.ar_polynomial(), spec.sigma2, max_lag);
}

inline std::vector<double> acf(const ArfimaSpec& spec, std::size_t max_lag) {
  auto g = acvf(spec, max_lag);
  const double g0 = g[0];
  for (auto& v : g) v /= g0;
  g[0] = 1.0;
  return g;
}

/// psi(0..max_lag) of Phi(z)^{-1} (1 - z)^{-d}.
inline std::vector<double> irf(const ArfimaSpec& spec, std::size_t max_lag) {
  const auto poly = spec.ar_polynomial();
  if (!schur_cohn_stable(poly)) throw std::domain_error("irf: AR operator has a zero on or inside the unit circle");
  detail::check_frac_index(spec.d);
  const auto kappa = ar_to_irf(poly, max_lag);
  const auto frac = detail::binomial_coeffs(-spec.d, max_lag + 1);
  return detail::truncated_convolve(frac, kappa);
}

}  // namespace lmboot
