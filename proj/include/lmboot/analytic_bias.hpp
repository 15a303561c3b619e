#pragma once

#include "lmboot/arfima.hpp"
#include "lmboot/arfit.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lmboot {

struct HoskingBiasInputs {
  double d = 0.0;
  double kappa_at_1 = 1.0;  ///< Phi(1)^{-1}
  double sigma2 = 1.0;
  double rho_k = 0.0;       ///< true rho(k)
  double gamma0 = 1.0;      ///< true gamma(0)
  std::size_t T = 0;
};

/**
 * Large-sample bias of the sample autocorrelation under long memory,
 *   -lambda / (d (1 + 2d)) * (1 - rho(k)) / gamma(0) * T^{2d-1},
 *   lambda = (sigma kappa(1))^2 Gamma(1-2d) / (Gamma(d) Gamma(1-d)).
 */
inline double hosking_bias(const HoskingBiasInputs& in) {
  if (in.d == 0.0 || !(std::abs(in.d) < 0.5)) throw std::domain_error("hosking_bias: need 0 < |d| < 0.5");
  if (!(in.gamma0 > 0.0)) throw std::domain_error("hosking_bias: gamma0 must be positive");
  if (in.T == 0) throw std::domain_error("hosking_bias: T must be positive");
  const auto g12 = signed_lgamma(1.0 - 2.0 * in.d);
  const auto gd = signed_lgamma(in.d);
  const auto g1d = signed_lgamma(1.0 - in.d);
  const double ratio = g12.sign * gd.sign * g1d.sign * std::exp(g12.log_abs - gd.log_abs - g1d.log_abs);
  const double lambda = in.sigma2 * in.kappa_at_1 * in.kappa_at_1 * ratio;
  const double d = in.d;
  return -lambda / (d * (1.0 + 2.0 * d)) * (1.0 - in.rho_k) / in.gamma0 *
         std::pow(static_cast<double>(in.T), 2.0 * d - 1.0);
}

struct QuadraticPairMoments {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double cov_ab = 0.0;
};

/// For y ~ N(0, Gamma) and symmetric A, B: E[y'Ay] = tr(A Gamma), cov[y'Ay, y'By] = 2 tr(A Gamma B Gamma).
inline QuadraticPairMoments gaussian_quadratic_moments(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                                       const Eigen::MatrixXd& Gamma) {
  const Eigen::MatrixXd AG = A * Gamma;
  const Eigen::MatrixXd BG = B * Gamma;
  return {AG.trace(), BG.trace(), 2.0 * (AG * BG).trace()};
}

/// Gaussian moments of C(k) = y'A_k y and C(0) = y'A_0 y.
struct QuadraticFormMoments {
  double mean_ck = 0.0;
  double mean_c0 = 0.0;
  double cov_ck_c0 = 0.0;
  double var_c0 = 0.0;
};

/**
 * Exact moments of the segment-demeaned lag-k cross product C(k) and the
 * full-demeaned variance C(0) for y ~ N(0, Gamma), Gamma = Toeplitz(gamma):
 * E[y'Ay] = tr(A Gamma), cov[y'Ay, y'By] = 2 tr(A Gamma B Gamma).
 *
 * A_k Gamma and A_0 Gamma are formed directly from shifted, column-centred rows
 * of Gamma, so the cost is O(T^2) rather than a dense triple product.
 */
inline QuadraticFormMoments lag_product_moments(std::span<const double> gamma, std::size_t T, std::size_t k) {
  if (gamma.size() < T) throw std::invalid_argument("lag_product_moments: need gamma(0..T-1)");
  if (k == 0 || k >= T) throw std::invalid_argument("lag_product_moments: need 1 <= k <= T-1");
  const std::size_t n = T - k;
  auto G = [&](std::size_t i, std::size_t j) { return gamma[i > j ? i - j : j - i]; };

  // column means of Gamma restricted to the rows k..T-1 (tail) and 0..n-1 (head)
  std::vector<double> tail_mean(T, 0.0), head_mean(T, 0.0), full_mean(T, 0.0);
  for (std::size_t j = 0; j < T; ++j) {
    double h = 0.0, t = 0.0, f = 0.0;
    for (std::size_t i = 0; i < T; ++i) {
      const double g = G(i, j);
      f += g;
      if (i < n) h += g;
      if (i >= k) t += g;
    }
    head_mean[j] = h / static_cast<double>(n);
    tail_mean[j] = t / static_cast<double>(n);
    full_mean[j] = f / static_cast<double>(T);
  }

  // A_k = (S1' P S2 + S2' P S1) / (2n); A_0 = (I - 11'/T) / T
  std::vector<double> AkG(T * T, 0.0), A0G(T * T);
  const double wk = 1.0 / (2.0 * static_cast<double>(n));
  const double w0 = 1.0 / static_cast<double>(T);
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      double v = 0.0;
      if (i < n) v += G(i + k, j) - tail_mean[j];
      if (i >= k) v += G(i - k, j) - head_mean[j];
      AkG[i * T + j] = wk * v;
      A0G[i * T + j] = w0 * (G(i, j) - full_mean[j]);
    }
  }

  QuadraticFormMoments m;
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    m.mean_ck += AkG[i * T + i];
    m.mean_c0 += A0G[i * T + i];
    for (std::size_t j = 0; j < T; ++j) {
      cov += AkG[i * T + j] * A0G[j * T + i];
      var += A0G[i * T + j] * A0G[j * T + i];
    }
  }
  m.cov_ck_c0 = 2.0 * cov;
  m.var_c0 = 2.0 * var;
  return m;
}

/**
 * E(r(k)) to O(1/T) (Marriott and Pope):
 *   E[C(k)]/E[C(0)] * (1 - cov[C(k),C(0)] / (E[C(k)] E[C(0)]) + var[C(0)] / E[C(0)]^2).
 */
inline double marriott_pope_expectation(std::span<const double> gamma, std::size_t T, std::size_t k) {
  const auto m = lag_product_moments(gamma, T, k);
  if (m.mean_ck == 0.0) throw std::domain_error("marriott_pope_expectation: E[C(k)] is zero");
  return m.mean_ck / m.mean_c0 *
         (1.0 - m.cov_ck_c0 / (m.mean_ck * m.mean_c0) + m.var_c0 / (m.mean_c0 * m.mean_c0));
}

/**
 * Plug-in O(1/T) bias of the lag-k sample autocorrelation: the reference
 * autocovariances come from an AR([(ln T)^2]) fitted to the data, and the
 * estimate is E(r(k)) - rho_ref(k).
 */
inline double lee_ko_bias_plugin(std::span<const double> y, std::size_t k = 1, FitMethod method = FitMethod::burg) {
  const std::size_t T = y.size();
  const std::size_t h = std::min(max_order(T), T - 1);
  const auto model = fit_ar(y, h, method);
  const auto gamma = ar_to_acvf(model, T - 1);
  return marriott_pope_expectation(gamma, T, k) - gamma[k] / gamma[0];
}

}  // namespace lmboot
