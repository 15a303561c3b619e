#pragma once

#include "lmboot/analytic_bias.hpp"
#include "lmboot/arfima.hpp"
#include "lmboot/estimators.hpp"
#include "lmboot/harness/config.hpp"
#include "lmboot/harness/kde.hpp"
#include "lmboot/rng.hpp"
#include "lmboot/sieve.hpp"
#include "lmboot/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

namespace lmboot {

struct LagSummary {
  double bias = 0.0;
  double rmse = 0.0;
  double mc_se = 0.0;  ///< sample sd / sqrt(n_ok)
  std::size_t n_ok = 0;
};

/// Moments of estimate - truth over the finite entries.
inline LagSummary summarize(std::span<const double> estimates, double truth) {
  LagSummary s;
  double sum = 0.0, sq = 0.0;
  for (double v : estimates) {
    if (!std::isfinite(v)) continue;
    const double e = v - truth;
    sum += e;
    sq += e * e;
    ++s.n_ok;
  }
  if (s.n_ok == 0) {
    s.bias = s.rmse = s.mc_se = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  const auto n = static_cast<double>(s.n_ok);
  s.bias = sum / n;
  s.rmse = std::sqrt(sq / n);
  double ss = 0.0;
  for (double v : estimates)
    if (std::isfinite(v)) ss += (v - truth - s.bias) * (v - truth - s.bias);
  s.mc_se = s.n_ok > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : std::numeric_limits<double>::quiet_NaN();
  return s;
}

/// One method applied to one statistic in one design cell.
struct MethodResult {
  Method method = Method::unadjusted;
  std::vector<std::size_t> lags;             ///< lags this method reports
  std::vector<std::vector<double>> estimates;  ///< [lag index][replication], NaN when failed
  std::vector<std::vector<double>> avg_boot;   ///< sieve methods: averaged bootstrap draws per table lag
  std::size_t n_failed = 0;

  [[nodiscard]] std::ptrdiff_t lag_index(std::size_t k) const {
    const auto it = std::find(lags.begin(), lags.end(), k);
    return it == lags.end() ? -1 : it - lags.begin();
  }
};

struct StatResult {
  StatKind kind = StatKind::irf;
  std::vector<double> truth;  ///< truth[k], k = 0..max_lag
  std::vector<MethodResult> methods;
};

struct CellResult {
  GridPoint point;
  std::size_t T = 0;
  std::vector<StatResult> stats;
  std::vector<std::string> failures;  ///< one line per failed (replication, method)
  bool failed = false;                ///< more than 1% of replications failed for some method
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;

  [[nodiscard]] bool failed() const {
    return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed; });
  }
};

namespace detail {

inline std::vector<std::size_t> lag_range(std::size_t L) {
  std::vector<std::size_t> v(L);
  std::iota(v.begin(), v.end(), std::size_t{1});
  return v;
}

inline std::vector<std::size_t> method_lags(Method m, std::size_t L) {
  if (m == Method::lee_ko) return {1};
  return lag_range(L);
}

// Stream index of each method under a replication seed; 0 is the simulation.
inline std::uint64_t method_stream(Method m) { return 1 + static_cast<std::uint64_t>(m); }

struct RepOutput {
  // [stat][method] -> estimates at method_lags, empty on failure
  std::vector<std::vector<std::vector<double>>> est;
  // [stat][method][table lag] -> sorted draws (sieve methods)
  std::vector<std::vector<std::vector<std::vector<double>>>> draws;
  std::vector<std::string> errors;
};

struct CellContext {
  const ExperimentConfig& cfg;
  GridPoint point;
  std::size_t T;
  std::uint64_t cell_seed;
  ArfimaSpec spec;
  const GaussianSampler& sampler;
  std::vector<double> acvf_true;  // 0..max_lag
};

inline RepOutput run_replication(const CellContext& ctx, std::size_t rep) {
  const auto& cfg = ctx.cfg;
  const std::size_t L = cfg.max_lag();
  const std::uint64_t rep_seed = derive_seed(ctx.cell_seed, rep);
  RepOutput out;
  out.est.assign(cfg.stats.size(), std::vector<std::vector<double>>(cfg.methods.size()));
  out.draws.assign(cfg.stats.size(), std::vector<std::vector<std::vector<double>>>(cfg.methods.size()));

  const auto y = ctx.sampler.draw(derive_seed(rep_seed, 0));
  std::vector<StatRequest> requests;
  for (auto kind : cfg.stats) requests.push_back({kind, lag_range(L), cfg.order_rule});

  std::vector<std::vector<double>> unadjusted(cfg.stats.size());
  for (std::size_t s = 0; s < cfg.stats.size(); ++s) unadjusted[s] = statistic(y, requests[s], cfg.fit_method);

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const Method m = cfg.methods[mi];
    try {
      if (m == Method::unadjusted) {
        for (std::size_t s = 0; s < cfg.stats.size(); ++s) out.est[s][mi] = unadjusted[s];
      } else if (is_sieve(m)) {
        SieveConfig sc;
        sc.method = m == Method::raw ? SieveMethod::raw
                    : m == Method::prefiltered_splw ? SieveMethod::prefiltered_splw
                                                    : SieveMethod::prefiltered_true_d;
        if (m == Method::prefiltered_true_d) sc.true_d = ctx.point.d;
        sc.B = cfg.B;
        sc.order_rule = cfg.order_rule;
        sc.fit_method = cfg.fit_method;
        sc.splw_exponent = cfg.splw_exponent;
        sc.seed = derive_seed(rep_seed, method_stream(m));
        const auto run = run_sieve_bootstrap(y, requests, sc);
        for (std::size_t s = 0; s < cfg.stats.size(); ++s) {
          auto& est = out.est[s][mi];
          for (const auto& d : run.dists[s]) est.push_back(bias_adjust(d, default_transform(d.kind)));
          for (auto k : cfg.table_lags) out.draws[s][mi].push_back(run.dists[s][k - 1].draws);
        }
      } else if (m == Method::kilian) {
        SieveConfig sc;
        sc.B = cfg.B;
        sc.order_rule = cfg.order_rule;
        sc.fit_method = cfg.fit_method;
        sc.seed = derive_seed(rep_seed, method_stream(m));
        for (std::size_t s = 0; s < cfg.stats.size(); ++s)
          if (applies_to(m, cfg.stats[s])) out.est[s][mi] = kilian_adjust(y, sc, requests[s].lags);
      } else if (m == Method::hosking_asy) {
        const double kappa = 1.0 / (1.0 - ctx.point.phi);
        for (std::size_t s = 0; s < cfg.stats.size(); ++s) {
          if (!applies_to(m, cfg.stats[s])) continue;
          auto& est = out.est[s][mi];
          for (std::size_t k = 1; k <= L; ++k) {
            HoskingBiasInputs in{ctx.point.d, kappa, cfg.sigma2, ctx.acvf_true[k] / ctx.acvf_true[0],
                                 ctx.acvf_true[0], ctx.T};
            est.push_back(unadjusted[s][k - 1] - hosking_bias(in));
          }
        }
      } else if (m == Method::lee_ko) {
        for (std::size_t s = 0; s < cfg.stats.size(); ++s)
          if (applies_to(m, cfg.stats[s]))
            out.est[s][mi] = {unadjusted[s][0] - lee_ko_bias_plugin(y, 1, cfg.fit_method)};
      }
      for (std::size_t s = 0; s < cfg.stats.size(); ++s)
        for (double v : out.est[s][mi])
          if (!std::isfinite(v)) throw std::runtime_error("non-finite estimate");
    } catch (const std::exception& e) {
      for (std::size_t s = 0; s < cfg.stats.size(); ++s) {
        out.est[s][mi].clear();
        out.draws[s][mi].clear();
      }
      out.errors.push_back("rep " + std::to_string(rep) + " method " + std::string(to_string(m)) + ": " + e.what());
    }
  }
  return out;
}

/// Runs f(i) for i in [0, n) on `threads` workers; f must only touch slot i.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

/**
 * Monte Carlo over the design grid. Replication r of cell c draws its series
 * from derive_seed(derive_seed(seed, c), r) and each method from a further
 * derived stream, and results are stored by replication index, so the output
 * does not depend on `threads`.
 */
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1) {
  cfg.validate();
  ExperimentResult result;
  result.config = cfg;
  const std::size_t L = cfg.max_lag();
  std::size_t cell_index = 0;
  for (auto T : cfg.T) {
    for (const auto& point : cfg.grid) {
      CellResult cell;
      cell.point = point;
      cell.T = T;
      ArfimaSpec spec{point.d, {point.phi}, cfg.sigma2};
      if (point.phi == 0.0) spec.ar.clear();
      const auto gamma = acvf(spec, T - 1);
      const GaussianSampler sampler(gamma);
      detail::CellContext ctx{cfg, point, T, derive_seed(cfg.seed, cell_index++), spec, sampler,
                              std::vector<double>(gamma.begin(), gamma.begin() + static_cast<std::ptrdiff_t>(L + 1))};

      std::vector<detail::RepOutput> reps(cfg.R);
      detail::parallel_for(cfg.R, threads, [&](std::size_t r) { reps[r] = detail::run_replication(ctx, r); });

      for (const auto& rep : reps) cell.failures.insert(cell.failures.end(), rep.errors.begin(), rep.errors.end());

      for (std::size_t s = 0; s < cfg.stats.size(); ++s) {
        StatResult sr;
        sr.kind = cfg.stats[s];
        sr.truth = sr.kind == StatKind::acf ? acf(spec, L) : irf(spec, L);
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
          const Method m = cfg.methods[mi];
          if (!applies_to(m, sr.kind)) continue;
          MethodResult mr;
          mr.method = m;
          mr.lags = detail::method_lags(m, L);
          mr.estimates.assign(mr.lags.size(), std::vector<double>(cfg.R, std::numeric_limits<double>::quiet_NaN()));
          std::vector<std::vector<std::vector<double>>> draws(cfg.table_lags.size());
          for (std::size_t r = 0; r < cfg.R; ++r) {
            const auto& e = reps[r].est[s][mi];
            if (e.empty()) {
              ++mr.n_failed;
              continue;
            }
            for (std::size_t i = 0; i < mr.lags.size(); ++i) mr.estimates[i][r] = e[i];
            const auto& dr = reps[r].draws[s][mi];
            for (std::size_t j = 0; j < dr.size(); ++j) draws[j].push_back(dr[j]);
          }
          if (is_sieve(m))
            for (auto& d : draws)
              mr.avg_boot.push_back(d.empty() ? std::vector<double>{} : averaged_bootstrap_distribution(d));
          if (100 * mr.n_failed > cfg.R) cell.failed = true;
          sr.methods.push_back(std::move(mr));
        }
        cell.stats.push_back(std::move(sr));
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

}  // namespace lmboot
