#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace lmboot {

/// Quantile of sorted data by linear interpolation between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

/// 0.9 min(sd, IQR/1.34) n^{-1/5}; sd alone when the IQR is zero.
inline double silverman_bandwidth(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double sd = sample_sd(s);
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double bw = 0.9 * spread * std::pow(static_cast<double>(s.size()), -0.2);
  if (!(bw > 0.0)) throw std::domain_error("kde: zero bandwidth (all samples equal)");
  return bw;
}

/// Gaussian kernel density estimate at each evaluation point.
inline std::vector<double> kde(std::span<const double> samples, std::span<const double> eval_points,
                               double bandwidth) {
  if (samples.empty()) throw std::invalid_argument("kde: empty sample");
  if (!(bandwidth > 0.0)) throw std::domain_error("kde: bandwidth must be positive");
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(eval_points.size());
  for (std::size_t i = 0; i < eval_points.size(); ++i) {
    double acc = 0.0;
    for (double s : samples) {
      const double u = (eval_points[i] - s) / bandwidth;
      acc += std::exp(-0.5 * u * u);
    }
    out[i] = acc * norm;
  }
  return out;
}

inline std::vector<double> kde(std::span<const double> samples, std::span<const double> eval_points) {
  return kde(samples, eval_points, silverman_bandwidth(samples));
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> x(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + step * static_cast<double>(i);
  x[n - 1] = hi;
  return x;
}

/// sup_x |F_a(x) - F_b(x)| between two empirical distributions.
inline double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto na = static_cast<double>(x.size());
  const auto nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

/// Element b is the mean over replications of each replication's b-th order statistic.
inline std::vector<double> averaged_bootstrap_distribution(const std::vector<std::vector<double>>& draws) {
  if (draws.empty()) throw std::invalid_argument("averaged_bootstrap_distribution: no replications");
  const std::size_t B = draws.front().size();
  std::vector<double> avg(B, 0.0);
  std::vector<double> sorted;
  for (const auto& rep : draws) {
    if (rep.size() != B) throw std::invalid_argument("averaged_bootstrap_distribution: unequal B");
    sorted.assign(rep.begin(), rep.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t b = 0; b < B; ++b) avg[b] += sorted[b];
  }
  for (auto& v : avg) v /= static_cast<double>(draws.size());
  return avg;
}

}  // namespace lmboot
