#pragma once

#include "lmboot/arfima.hpp"
#include "lmboot/arfit.hpp"
#include "lmboot/estimators.hpp"
#include "lmboot/fracdiff.hpp"
#include "lmboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmboot {

enum class SieveMethod { raw, prefiltered_splw, prefiltered_true_d };

inline std::string_view to_string(SieveMethod m) {
  switch (m) {
    case SieveMethod::raw: return "raw";
    case SieveMethod::prefiltered_splw: return "prefiltered_splw";
    case SieveMethod::prefiltered_true_d: return "prefiltered_true_d";
  }
  return "?";
}

inline bool is_prefiltered(SieveMethod m) { return m != SieveMethod::raw; }

struct SieveConfig {
  SieveMethod method = SieveMethod::raw;
  std::size_t B = 299;
  OrderRule order_rule = OrderRule::fixed_log_sq;
  FitMethod fit_method = FitMethod::burg;
  std::optional<double> true_d;  ///< required exactly for prefiltered_true_d
  std::uint64_t seed = 0;
  double splw_exponent = 0.65;  ///< SPLW bandwidth N = floor(T^exponent)

  void validate() const {
    if (B < 2) throw std::invalid_argument("SieveConfig: B must be at least 2");
    if (!(splw_exponent > 0.0 && splw_exponent < 1.0))
      throw std::invalid_argument("SieveConfig: splw_exponent must lie in (0, 1)");
    if ((method == SieveMethod::prefiltered_true_d) != true_d.has_value())
      throw std::invalid_argument("SieveConfig: true_d must be given exactly for prefiltered_true_d");
  }
};

/**
 * Everything needed to generate resamples: the (possibly fractionally
 * differenced) series w, its centred copy, the AR(h) fit and the standardised
 * residual pool.
 */
struct SieveModel {
  SieveMethod method = SieveMethod::raw;
  double d = 0.0;  ///< filter index; 0 for the raw sieve
  ArModel ar;
  Series w_centred;
  double w_mean = 0.0;
  double y_mean = 0.0;
  Series pool;  ///< standardised residuals, mean 0 and (divisor T) variance 1
};

/**
 * Fit the sieve to y. Prefiltered methods difference the demeaned series by
 * (1 - z)^d first, where d is `d_hat` when given, the configured true d, or an
 * SPLW estimate. The AR order follows `config.order_rule` applied to w.
 */
inline SieveModel fit_sieve(std::span<const double> y, const SieveConfig& config,
                            std::optional<double> d_hat = std::nullopt) {
  config.validate();
  const std::size_t T = y.size();
  if (T < 3) throw std::invalid_argument("fit_sieve: need at least 3 observations");
  SieveModel m;
  m.method = config.method;
  m.y_mean = detail::mean_of(y);
  switch (config.method) {
    case SieveMethod::raw: m.d = 0.0; break;
    case SieveMethod::prefiltered_true_d: m.d = *config.true_d; break;
    case SieveMethod::prefiltered_splw: m.d = d_hat ? *d_hat : splw(y, default_splw_bandwidth(T, config.splw_exponent)).d_hat;
      break;
  }
  Series w = frac_filter(y, m.d, true);
  m.w_mean = detail::mean_of(w);
  m.w_centred.resize(T);
  for (std::size_t t = 0; t < T; ++t) m.w_centred[t] = w[t] - m.w_mean;

  const std::size_t cap = std::min(max_order(T), T - 1);
  const auto path = fit_ar_path(m.w_centred, cap, config.fit_method);
  const std::size_t h = config.order_rule == OrderRule::aic ? aic_argmin(path.sigma2, T) : cap;
  m.ar = path.model(h);
  if (!schur_cohn_stable(m.ar.phi)) throw std::domain_error("fit_sieve: fitted AR operator is not stationary");

  const auto e = ar_residuals(m.w_centred, m.ar.phi, true);
  const double e_mean = detail::mean_of(e);
  double ss = 0.0;
  for (double v : e) ss += (v - e_mean) * (v - e_mean);
  const double s = std::sqrt(ss / static_cast<double>(T));
  if (!(s > 0.0)) throw std::domain_error("fit_sieve: residuals are constant");
  m.pool.resize(T);
  for (std::size_t t = 0; t < T; ++t) m.pool[t] = (e[t] - e_mean) / s;
  return m;
}

/**
 * One resample. The stream draws the start index tau on {h, ..., T} first and
 * then T residual indices. The recursion starts from the observed block
 * w(tau-h+1..tau), runs on the centred scale and the means are restored at
 * the end, after the inverse filter for prefiltered methods.
 */
inline Series draw_resample(const SieveModel& m, std::uint64_t seed) {
  const std::size_t T = m.w_centred.size();
  const std::size_t h = m.ar.order();
  const auto& phi = m.ar.phi;
  const double sigma = std::sqrt(m.ar.sigma2);
  Stream stream(seed);
  const std::size_t tau = h + stream.index(T - h + 1);  // 1-based

  // x holds h start values followed by the T generated values
  std::vector<double> x(h + T);
  for (std::size_t j = 1; j <= h; ++j) x[h - j] = m.w_centred[tau - j];
  for (std::size_t t = 0; t < T; ++t) {
    double acc = sigma * m.pool[stream.index(T)];
    for (std::size_t j = 1; j <= h; ++j) acc -= phi[j - 1] * x[h + t - j];
    x[h + t] = acc;
  }
  Series w_star(x.begin() + static_cast<std::ptrdiff_t>(h), x.end());
  for (auto& v : w_star) v += m.w_mean;
  Series y_star = m.d == 0.0 ? std::move(w_star) : frac_unfilter(w_star, m.d);
  for (auto& v : y_star) {
    v += m.y_mean;
    if (!std::isfinite(v)) throw std::runtime_error("draw_resample: non-finite value generated");
  }
  return y_star;
}

/// Seed of resample b under the configured base seed.
inline std::uint64_t resample_seed(std::uint64_t base, std::size_t b) { return derive_seed(base, b); }

/// B resampled series of length T.
inline std::vector<Series> sieve_resample(std::span<const double> y, const SieveConfig& config,
                                          std::optional<double> d_hat = std::nullopt) {
  const auto m = fit_sieve(y, config, d_hat);
  std::vector<Series> out;
  out.reserve(config.B);
  for (std::size_t b = 0; b < config.B; ++b) out.push_back(draw_resample(m, resample_seed(config.seed, b)));
  return out;
}

/**
 * Reference values implied by the resampling model: the fitted AR(h) alone
 * for the raw sieve, ARFIMA(h, d, 0) with the fitted AR part otherwise.
 */
inline std::vector<double> reference_values(StatKind kind, std::span<const std::size_t> lags, SieveMethod method,
                                            const ArModel& fitted, std::optional<double> d_hat = std::nullopt) {
  const std::size_t top = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
  std::vector<double> curve;
  if (!is_prefiltered(method)) {
    curve = kind == StatKind::irf ? ar_to_irf(fitted, top) : ar_to_acf(fitted, top);
  } else {
    if (!d_hat) throw std::invalid_argument("reference_values: prefiltered methods need d_hat");
    const auto spec = arfima_from_ar(*d_hat, fitted);
    curve = kind == StatKind::irf ? irf(spec, top) : acf(spec, top);
  }
  std::vector<double> out(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) out[i] = curve[lags[i]];
  return out;
}

inline double reference_value(StatKind kind, std::size_t lag, SieveMethod method, const ArModel& fitted,
                              std::optional<double> d_hat = std::nullopt) {
  const std::size_t lags[] = {lag};
  return reference_values(kind, lags, method, fitted, d_hat)[0];
}

struct BootstrapDistribution {
  StatKind kind = StatKind::irf;
  std::size_t lag = 0;
  std::vector<double> draws;  ///< sorted ascending
  double s_ref = 0.0;
  double s_obs = 0.0;
};

enum class BiasTransform { identity, fisher_z };

inline BiasTransform default_transform(StatKind kind) {
  return kind == StatKind::acf ? BiasTransform::fisher_z : BiasTransform::identity;
}

/// s_obs - (mean_draws - s_ref), on the transformed scale for fisher_z.
inline double bias_adjust(double s_obs, double mean_draws, double s_ref, BiasTransform transform) {
  if (transform == BiasTransform::identity) return s_obs - (mean_draws - s_ref);
  return fisher_z_inv(fisher_z(s_obs) - (mean_draws - fisher_z(s_ref)));
}

inline double bias_adjust(const BootstrapDistribution& dist, BiasTransform transform) {
  if (dist.draws.empty()) throw std::invalid_argument("bias_adjust: no bootstrap draws");
  double sum = 0.0;
  for (double v : dist.draws) sum += transform == BiasTransform::fisher_z ? fisher_z(v) : v;
  return bias_adjust(dist.s_obs, sum / static_cast<double>(dist.draws.size()), dist.s_ref, transform);
}

struct SieveRun {
  SieveModel model;
  /// dists[r][i]: request r, lag requests[r].lags[i]
  std::vector<std::vector<BootstrapDistribution>> dists;
};

/**
 * Fit the sieve once, draw B resamples and evaluate every requested statistic
 * on each. Each resample has its own derived seed, so the draws for a given
 * b do not depend on which statistics are requested.
 */
inline SieveRun run_sieve_bootstrap(std::span<const double> y, std::span<const StatRequest> requests,
                                    const SieveConfig& config, std::optional<double> d_hat = std::nullopt) {
  SieveRun run;
  run.model = fit_sieve(y, config, d_hat);
  std::optional<double> ref_d;
  if (is_prefiltered(config.method)) ref_d.emplace(run.model.d);
  run.dists.resize(requests.size());
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const auto& req = requests[r];
    const auto obs = statistic(y, req, config.fit_method);
    const auto ref = reference_values(req.kind, req.lags, config.method, run.model.ar, ref_d);
    auto& ds = run.dists[r];
    ds.resize(req.lags.size());
    for (std::size_t i = 0; i < req.lags.size(); ++i) {
      ds[i].kind = req.kind;
      ds[i].lag = req.lags[i];
      ds[i].s_obs = obs[i];
      ds[i].s_ref = ref[i];
      ds[i].draws.reserve(config.B);
    }
  }
  for (std::size_t b = 0; b < config.B; ++b) {
    const auto ystar = draw_resample(run.model, resample_seed(config.seed, b));
    for (std::size_t r = 0; r < requests.size(); ++r) {
      const auto s = statistic(ystar, requests[r], config.fit_method);
      for (std::size_t i = 0; i < s.size(); ++i) run.dists[r][i].draws.push_back(s[i]);
    }
  }
  for (auto& per_request : run.dists)
    for (auto& d : per_request) std::sort(d.draws.begin(), d.draws.end());
  return run;
}

/// Bias-adjusted statistic for one request, using the default transform of its kind.
inline std::vector<double> sieve_adjust(std::span<const double> y, const StatRequest& request,
                                        const SieveConfig& config, std::optional<double> d_hat = std::nullopt) {
  const auto run = run_sieve_bootstrap(y, std::span(&request, 1), config, d_hat);
  std::vector<double> out;
  for (const auto& d : run.dists[0]) out.push_back(bias_adjust(d, default_transform(request.kind)));
  return out;
}

/// 2 phi_bar - mean(phi*), reflected into the stationary region when needed.
inline std::vector<double> kilian_correct(std::span<const double> phi_bar, std::span<const double> mean_star) {
  if (phi_bar.size() != mean_star.size()) throw std::invalid_argument("kilian_correct: length mismatch");
  std::vector<double> bc(phi_bar.size());
  for (std::size_t j = 0; j < bc.size(); ++j) bc[j] = 2.0 * phi_bar[j] - mean_star[j];
  return reflect_to_stationary(bc);
}

/**
 * Coefficient-space correction: fit AR(h) to y, refit AR(h) at the same h on B
 * raw-sieve resamples, correct the coefficients and invert to impulse
 * responses. Under the AIC rule h is selected once on y.
 */
inline std::vector<double> kilian_adjust(std::span<const double> y, const SieveConfig& config,
                                         std::span<const std::size_t> lags) {
  detail::check_lags(lags, y.size());
  SieveConfig raw = config;
  raw.method = SieveMethod::raw;
  raw.true_d.reset();
  const auto model = fit_sieve(y, raw);
  const std::size_t h = model.ar.order();
  std::vector<double> mean_star(h, 0.0);
  for (std::size_t b = 0; b < raw.B; ++b) {
    const auto ystar = draw_resample(model, resample_seed(raw.seed, b));
    const auto fit = fit_ar(ystar, h, raw.fit_method);
    for (std::size_t j = 0; j < h; ++j) mean_star[j] += fit.phi[j];
  }
  for (auto& v : mean_star) v /= static_cast<double>(raw.B);
  const auto bc = kilian_correct(model.ar.phi, mean_star);
  const std::size_t top = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
  const auto psi = ar_to_irf(bc, top);
  std::vector<double> out(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) out[i] = psi[lags[i]];
  return out;
}

}  // namespace lmboot
