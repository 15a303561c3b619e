#include "lmboot/sieve.hpp"
#include "lmboot/simulate.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace lmboot;
using Catch::Approx;

namespace {

Series fixture(double d = 0.4, double phi = 0.9, std::size_t T = 300, std::uint64_t seed = 1) {
  return simulate_gaussian({ArfimaSpec{d, {phi}, 1.0}, T, seed});
}

// True when v equals some element of `pool` scaled by `scale`.
bool in_scaled_pool(double v, const Series& pool, double scale) {
  for (double p : pool)
    if (std::abs(v - scale * p) < 1e-9 * std::max(1.0, std::abs(v))) return true;
  return false;
}

}  // namespace

TEST_CASE("SieveConfig validation", "[sieve]") {
  SieveConfig c;
  c.B = 1;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c.B = 10;
  c.true_d = 0.2;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c.method = SieveMethod::prefiltered_true_d;
  REQUIRE_NOTHROW(c.validate());
  c.true_d.reset();
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c.method = SieveMethod::raw;
  c.splw_exponent = 0.0;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("SPLW prefilter uses the configured bandwidth exponent", "[sieve]") {
  const auto y = fixture(0.3, 0.5, 400, 8);
  SieveConfig c;
  c.method = SieveMethod::prefiltered_splw;
  for (double e : {0.5, 0.65, 0.8})
    REQUIRE(fit_sieve(y, [&] { auto cc = c; cc.splw_exponent = e; return cc; }()).d ==
            splw(y, default_splw_bandwidth(y.size(), e)).d_hat);
}

TEST_CASE("fitted sieve: order rule, pool moments", "[sieve]") {
  const auto y = fixture();
  SieveConfig c;
  const auto m = fit_sieve(y, c);
  REQUIRE(m.ar.order() == max_order(y.size()));
  REQUIRE(m.d == 0.0);
  double mean = 0.0, var = 0.0;
  for (double v : m.pool) mean += v;
  mean /= double(m.pool.size());
  for (double v : m.pool) var += (v - mean) * (v - mean);
  REQUIRE(std::abs(mean) < 1e-12);
  REQUIRE(var / double(m.pool.size()) == Approx(1.0).epsilon(1e-12));
  c.order_rule = OrderRule::aic;
  REQUIRE(fit_sieve(y, c).ar.order() == select_order_aic(m.w_centred, max_order(y.size())));
}

TEST_CASE("AR(0) sieve resamples the rescaled residual pool", "[sieve]") {
  SieveModel m = fit_sieve(fixture(), SieveConfig{});
  m.ar = ArModel{{}, 4.0, FitMethod::burg};
  const auto y = draw_resample(m, 3);
  REQUIRE(y.size() == m.pool.size());
  for (double v : y) REQUIRE(in_scaled_pool(v - m.y_mean - m.w_mean, m.pool, 2.0));
}

TEST_CASE("resampled innovations are standardised", "[sieve]") {
  SieveModel m = fit_sieve(fixture(), SieveConfig{});
  m.ar = ArModel{{}, 1.0, FitMethod::burg};
  m.w_mean = m.y_mean = 0.0;
  const std::size_t B = 1000, T = m.pool.size();
  double s = 0.0, ss = 0.0;
  for (std::size_t b = 0; b < B; ++b)
    for (double v : draw_resample(m, resample_seed(5, b))) {
      s += v;
      ss += v * v;
    }
  const double n = double(B * T);
  REQUIRE(std::abs(s / n) < 4.0 / std::sqrt(n));
  REQUIRE(ss / n - (s / n) * (s / n) == Approx(1.0).margin(0.05));
}

TEST_CASE("raw resamples follow the fitted recursion", "[sieve]") {
  const auto y = fixture(0.2, 0.6, 200, 4);
  SieveConfig c;
  const auto m = fit_sieve(y, c);
  const auto& phi = m.ar.phi;
  const std::size_t h = phi.size();
  const double sigma = std::sqrt(m.ar.sigma2);
  for (std::uint64_t b = 0; b < 5; ++b) {
    const auto ys = draw_resample(m, resample_seed(c.seed, b));
    for (std::size_t t = h; t < ys.size(); ++t) {
      double e = ys[t] - m.y_mean - m.w_mean;
      for (std::size_t j = 1; j <= h; ++j) e += phi[j - 1] * (ys[t - j] - m.y_mean - m.w_mean);
      REQUIRE(in_scaled_pool(e, m.pool, sigma));
    }
  }
}

TEST_CASE("prefiltered resamples difference back to an AR(h) path", "[sieve]") {
  const auto y = fixture(0.4, 0.6, 200, 6);
  SieveConfig c;
  c.method = SieveMethod::prefiltered_true_d;
  c.true_d = 0.4;
  const auto m = fit_sieve(y, c);
  REQUIRE(m.d == 0.4);
  const auto& phi = m.ar.phi;
  const double sigma = std::sqrt(m.ar.sigma2);
  const auto ys = draw_resample(m, 17);
  Series centred(ys);
  for (auto& v : centred) v -= m.y_mean;
  const auto w = frac_filter(centred, 0.4);
  for (std::size_t t = phi.size(); t < w.size(); ++t) {
    double e = w[t] - m.w_mean;
    for (std::size_t j = 1; j <= phi.size(); ++j) e += phi[j - 1] * (w[t - j] - m.w_mean);
    REQUIRE(in_scaled_pool(e, m.pool, sigma));
  }
}

TEST_CASE("prefiltering with d = 0 reproduces the raw sieve", "[sieve]") {
  const auto y = fixture();
  SieveConfig raw;
  raw.B = 20;
  raw.seed = 99;
  SieveConfig zero = raw;
  zero.method = SieveMethod::prefiltered_true_d;
  zero.true_d = 0.0;
  SieveConfig splw0 = raw;
  splw0.method = SieveMethod::prefiltered_splw;
  const auto a = sieve_resample(y, raw);
  REQUIRE(a == sieve_resample(y, zero));
  REQUIRE(a == sieve_resample(y, splw0, 0.0));
}

TEST_CASE("resampling is deterministic and seed dependent", "[sieve]") {
  const auto y = fixture();
  SieveConfig c;
  c.B = 10;
  c.method = SieveMethod::prefiltered_splw;
  c.seed = 4;
  const auto a = sieve_resample(y, c);
  REQUIRE(a == sieve_resample(y, c));
  c.seed = 5;
  REQUIRE(a != sieve_resample(y, c));
  for (const auto& s : a) REQUIRE(s.size() == y.size());
}

TEST_CASE("Burg sieves never explode", "[sieve][property]") {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Series y(250);
    double s = 0.0;
    for (auto& v : y) v = s += nd(gen);  // random walk: near-unit-root fits
    SieveConfig c;
    c.B = 20;
    c.seed = std::uint64_t(trial);
    c.method = trial % 2 ? SieveMethod::raw : SieveMethod::prefiltered_splw;
    for (const auto& r : sieve_resample(y, c))
      for (double v : r) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("reference values", "[sieve]") {
  const ArModel ar1{{-0.5}, 1.0, FitMethod::burg};
  REQUIRE(reference_value(StatKind::irf, 2, SieveMethod::raw, ar1) == Approx(0.25));
  REQUIRE(reference_value(StatKind::acf, 2, SieveMethod::raw, ar1) == Approx(0.25));
  const ArModel white{{}, 1.0, FitMethod::burg};
  REQUIRE(reference_value(StatKind::acf, 1, SieveMethod::prefiltered_splw, white, 0.4) == Approx(2.0 / 3.0));
  REQUIRE(reference_value(StatKind::irf, 2, SieveMethod::prefiltered_true_d, white, 0.4) == Approx(0.28));
  REQUIRE_THROWS_AS(reference_value(StatKind::irf, 2, SieveMethod::prefiltered_splw, white), std::invalid_argument);
}

TEST_CASE("bias adjustment arithmetic", "[sieve]") {
  REQUIRE(bias_adjust(0.5, 0.4, 0.6, BiasTransform::identity) == Approx(0.7));
  REQUIRE(bias_adjust(0.5, 0.6, 0.6, BiasTransform::identity) == 0.5);
  BootstrapDistribution d{StatKind::acf, 1, {0.6, 0.7, 0.8}, 0.8, 0.9};
  const double z = (std::atanh(0.6) + std::atanh(0.7) + std::atanh(0.8)) / 3.0;
  REQUIRE(bias_adjust(d, BiasTransform::fisher_z) == Approx(std::tanh(std::atanh(0.9) - z + std::atanh(0.8))));
  REQUIRE(bias_adjust(0.9, std::atanh(0.7), 0.8, BiasTransform::fisher_z) == Approx(0.9358490566037736));
  BootstrapDistribution edge{StatKind::acf, 1, {0.2, 1.0}, 0.5, 0.5};
  REQUIRE_THROWS_AS(bias_adjust(edge, BiasTransform::fisher_z), std::domain_error);
  REQUIRE(default_transform(StatKind::acf) == BiasTransform::fisher_z);
  REQUIRE(default_transform(StatKind::irf) == BiasTransform::identity);
}

TEST_CASE("property: Fisher-z adjustment stays inside (-1, 1)", "[sieve][property]") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-0.999999, 0.999999);
  for (int i = 0; i < 5000; ++i) {
    BootstrapDistribution d{StatKind::acf, 1, {}, u(gen), u(gen)};
    for (int b = 0; b < 5; ++b) d.draws.push_back(u(gen));
    const double r = bias_adjust(d, BiasTransform::fisher_z);
    REQUIRE(r > -1.0);
    REQUIRE(r < 1.0);
  }
}

TEST_CASE("bootstrap distributions are sorted, sized and anchored", "[sieve]") {
  const auto y = fixture(0.4, 0.6, 200, 2);
  SieveConfig c;
  c.B = 15;
  c.seed = 3;
  c.method = SieveMethod::prefiltered_splw;
  const std::vector<StatRequest> reqs{{StatKind::acf, {1, 4}, OrderRule::fixed_log_sq},
                                      {StatKind::irf, {1, 4}, OrderRule::fixed_log_sq}};
  const auto run = run_sieve_bootstrap(y, reqs, c);
  const auto series = sieve_resample(y, c);
  for (std::size_t r = 0; r < reqs.size(); ++r) {
    const auto obs = statistic(y, reqs[r]);
    const auto ref = reference_values(reqs[r].kind, reqs[r].lags, c.method, run.model.ar, run.model.d);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& d = run.dists[r][i];
      REQUIRE(d.draws.size() == c.B);
      REQUIRE(std::is_sorted(d.draws.begin(), d.draws.end()));
      REQUIRE(d.s_obs == obs[i]);
      REQUIRE(d.s_ref == ref[i]);
      std::vector<double> direct;
      for (const auto& s : series) direct.push_back(statistic(s, reqs[r])[i]);
      std::sort(direct.begin(), direct.end());
      REQUIRE(direct == d.draws);
    }
  }
  REQUIRE(sieve_adjust(y, reqs[0], c).size() == 2);
}

TEST_CASE("Kilian coefficient correction", "[sieve]") {
  const std::vector<double> bar{-0.6}, star{-0.5};
  const auto bc = kilian_correct(bar, star);
  REQUIRE(bc[0] == Approx(-0.7));
  REQUIRE(ar_to_irf(bc, 2)[2] == Approx(0.49));
  REQUIRE(kilian_correct(bar, bar) == bar);
  const std::vector<double> hi{-0.9}, lo{-0.7};
  const auto fixed = kilian_correct(hi, lo);  // 2(-0.9) + 0.7 = -1.1, reflected
  REQUIRE(fixed[0] == Approx(-1.0 / 1.1).epsilon(1e-10));
  REQUIRE_THROWS_AS(kilian_correct(bar, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("Kilian adjustment is deterministic and finite", "[sieve]") {
  const auto y = fixture();
  SieveConfig c;
  c.B = 30;
  c.seed = 12;
  const std::vector<std::size_t> lags{1, 6, 12};
  const auto a = kilian_adjust(y, c, lags);
  REQUIRE(a == kilian_adjust(y, c, lags));
  for (double v : a) REQUIRE(std::isfinite(v));
}
