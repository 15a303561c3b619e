#pragma once

#include "lmboot/harness/experiment.hpp"
#include "lmboot/harness/kde.hpp"
#include "lmboot/rng.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#ifndef LMBOOT_VERSION
#define LMBOOT_VERSION "unknown"
#endif

namespace lmboot {

inline constexpr std::string_view software_version = LMBOOT_VERSION;

/// Shortest round-trip decimal form; locale independent, '.' separator.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string cell_directory_name(const GridPoint& p, std::size_t T) {
  return "d" + format_number(p.d) + "_phi" + format_number(p.phi) + "_T" + std::to_string(T);
}

namespace detail {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline std::vector<double> finite_only(std::span<const double> v) {
  std::vector<double> out;
  for (double x : v)
    if (std::isfinite(x)) out.push_back(x);
  return out;
}

inline std::optional<double> try_bandwidth(std::span<const double> x) {
  if (x.size() < 2) return std::nullopt;
  try {
    return silverman_bandwidth(x);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

// Density column; "nan" throughout when the sample cannot be smoothed.
inline std::vector<std::string> density_column(std::span<const double> sample, std::span<const double> grid) {
  std::vector<std::string> col(grid.size(), "nan");
  const auto bw = try_bandwidth(sample);
  if (!bw) return col;
  const auto f = kde(sample, grid, *bw);
  for (std::size_t i = 0; i < grid.size(); ++i) col[i] = format_number(f[i]);
  return col;
}

inline const MethodResult* find_method(const StatResult& s, Method m) {
  for (const auto& mr : s.methods)
    if (mr.method == m) return &mr;
  return nullptr;
}

inline void write_table(const ExperimentResult& res, StatKind kind, const std::filesystem::path& path) {
  const auto& cfg = res.config;
  CsvWriter w(path);
  w.row({"d", "phi", "T", "order_rule", "method", "k", "bias", "rmse", "mc_se", "n_ok"});
  for (const auto& cell : res.cells) {
    for (const auto& sr : cell.stats) {
      if (sr.kind != kind) continue;
      for (const auto& mr : sr.methods) {
        const std::vector<std::string> lead{format_number(cell.point.d), format_number(cell.point.phi),
                                            std::to_string(cell.T), std::string(to_string(cfg.order_rule)),
                                            std::string(to_string(mr.method))};
        double sb = 0.0, sr2 = 0.0, sse = 0.0;
        std::size_t min_ok = std::numeric_limits<std::size_t>::max();
        std::size_t present = 0;
        for (auto k : cfg.table_lags) {
          const auto i = mr.lag_index(k);
          if (i < 0) continue;
          const auto s = summarize(mr.estimates[static_cast<std::size_t>(i)], sr.truth[k]);
          auto row = lead;
          for (const auto& f : {std::to_string(k), format_number(s.bias), format_number(s.rmse),
                                format_number(s.mc_se), std::to_string(s.n_ok)})
            row.push_back(f);
          w.row(row);
          sb += s.bias;
          sr2 += s.rmse;
          sse += s.mc_se;
          min_ok = std::min(min_ok, s.n_ok);
          ++present;
        }
        if (present == cfg.table_lags.size() && present > 1) {
          const auto n = static_cast<double>(present);
          auto row = lead;
          for (const auto& f : {std::string("av"), format_number(sb / n), format_number(sr2 / n),
                                format_number(sse / n), std::to_string(min_ok)})
            row.push_back(f);
          w.row(row);
        }
      }
    }
  }
}

inline void write_panels(const ExperimentConfig& cfg, const StatResult& sr, const MethodResult& mr,
                         const std::filesystem::path& dir) {
  const MethodResult* un = find_method(sr, Method::unadjusted);
  const MethodResult* asy = find_method(sr, Method::hosking_asy);
  const MethodResult* lk = find_method(sr, Method::lee_ko);
  for (std::size_t j = 0; j < cfg.table_lags.size(); ++j) {
    const std::size_t k = cfg.table_lags[j];
    const auto i = static_cast<std::size_t>(mr.lag_index(k));
    std::vector<std::vector<double>> samples;
    std::vector<std::string> names{"mc_density", "mc_ba_density", "bs_av_density"};
    samples.push_back(un ? finite_only(un->estimates[k - 1]) : std::vector<double>{});
    samples.push_back(finite_only(mr.estimates[i]));
    samples.push_back(j < mr.avg_boot.size() ? mr.avg_boot[j] : std::vector<double>{});
    if (sr.kind == StatKind::acf && asy) {
      names.emplace_back("ba_asy");
      samples.push_back(finite_only(asy->estimates[k - 1]));
    }
    if (sr.kind == StatKind::acf && lk && k == 1) {
      names.emplace_back("ba_lk");
      samples.push_back(finite_only(lk->estimates[0]));
    }

    double lo = std::numeric_limits<double>::infinity(), hi = -lo, pad = 0.0;
    for (const auto& s : samples) {
      for (double v : s) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (auto bw = try_bandwidth(s)) pad = std::max(pad, 3.0 * *bw);
    }
    if (!(lo <= hi)) continue;
    if (pad == 0.0) pad = 1e-3;
    const auto grid = linspace(lo - pad, hi + pad, cfg.panel_points);

    std::vector<std::vector<std::string>> cols;
    for (const auto& s : samples) cols.push_back(density_column(s, grid));
    CsvWriter w(dir / ("panel_" + std::string(to_string(sr.kind)) + "_k" + std::to_string(k) + ".csv"));
    std::vector<std::string> header{"x"};
    header.insert(header.end(), names.begin(), names.end());
    w.row(header);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::vector<std::string> row{format_number(grid[g])};
      for (const auto& c : cols) row.push_back(c[g]);
      w.row(row);
    }
  }
}

inline double finite_mean(std::span<const double> v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      s += x;
      ++n;
    }
  return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

inline void write_profile(const ExperimentConfig& cfg, const StatResult& sr, const MethodResult& mr,
                          const std::filesystem::path& dir) {
  const MethodResult* un = find_method(sr, Method::unadjusted);
  CsvWriter w(dir / ("profile_" + std::string(to_string(sr.kind)) + ".csv"));
  w.row({"k", "truth", "mc_mean", "mc_ba_mean"});
  for (std::size_t k = 1; k <= cfg.profile_max_lag; ++k) {
    const auto i = mr.lag_index(k);
    w.row({std::to_string(k), format_number(sr.truth[k]),
           format_number(un ? finite_mean(un->estimates[k - 1]) : std::numeric_limits<double>::quiet_NaN()),
           format_number(i < 0 ? std::numeric_limits<double>::quiet_NaN()
                               : finite_mean(mr.estimates[static_cast<std::size_t>(i)]))});
  }
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

inline void write_meta(const ExperimentResult& res, const std::filesystem::path& path) {
  const auto& c = res.config;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<std::string> grid, Ts, methods, stats, lags;
  for (const auto& g : c.grid) grid.push_back(format_number(g.d) + ":" + format_number(g.phi));
  for (auto t : c.T) Ts.push_back(std::to_string(t));
  for (auto m : c.methods) methods.emplace_back(to_string(m));
  for (auto s : c.stats) stats.emplace_back(to_string(s));
  for (auto k : c.table_lags) lags.push_back(std::to_string(k));
  out << "software = lmboot " << software_version << '\n'
      << "rng = " << rng_algorithm_id << '\n'
      << "grid = " << join(grid) << '\n'
      << "T = " << join(Ts) << '\n'
      << "R = " << c.R << '\n'
      << "B = " << c.B << '\n'
      << "methods = " << join(methods) << '\n'
      << "stats = " << join(stats) << '\n'
      << "table_lags = " << join(lags) << '\n'
      << "profile_max_lag = " << c.profile_max_lag << '\n'
      << "order_rule = " << to_string(c.order_rule) << '\n'
      << "seed = " << c.seed << '\n'
      << "sigma2 = " << format_number(c.sigma2) << '\n'
      << "fit_method = " << to_string(c.fit_method) << '\n'
      << "panel_points = " << c.panel_points << '\n'
      << "splw_exponent = " << format_number(c.splw_exponent) << '\n';
  if (c.has_method(Method::hosking_asy)) out << "note = hosking_asy is infeasible: it uses the true DGP parameters\n";
  for (const auto& cell : res.cells) {
    out << "cell " << cell_directory_name(cell.point, cell.T) << " = " << (cell.failed ? "FAILED" : "ok") << " ("
        << cell.failures.size() << " failed method runs)\n";
    for (const auto& f : cell.failures) out << "  " << f << '\n';
  }
}

}  // namespace detail

/**
 * Layout under `dir`:
 *   table_<stat>.csv, run_meta.txt
 *   <cell>/<method>/panel_<stat>_k<k>.csv   (sieve methods)
 *   <cell>/<method>/profile_<stat>.csv      (every adjusted method reporting all lags)
 */
inline void emit_outputs(const ExperimentResult& res, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const auto& cfg = res.config;
  fs::create_directories(dir);
  for (auto kind : cfg.stats)
    detail::write_table(res, kind, dir / ("table_" + std::string(to_string(kind)) + ".csv"));
  for (const auto& cell : res.cells) {
    const auto cell_dir = dir / cell_directory_name(cell.point, cell.T);
    for (const auto& sr : cell.stats) {
      for (const auto& mr : sr.methods) {
        if (mr.method == Method::unadjusted) continue;
        const auto mdir = cell_dir / std::string(to_string(mr.method));
        const bool panels = is_sieve(mr.method);
        const bool profile = cfg.profile_max_lag > 0 && mr.lags.size() >= cfg.profile_max_lag;
        if (!panels && !profile) continue;
        fs::create_directories(mdir);
        if (panels) detail::write_panels(cfg, sr, mr, mdir);
        if (profile) detail::write_profile(cfg, sr, mr, mdir);
      }
    }
  }
  detail::write_meta(res, dir / "run_meta.txt");
}

}  // namespace lmboot
