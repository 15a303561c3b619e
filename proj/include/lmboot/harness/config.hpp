#pragma once

#include "lmboot/arfit.hpp"
#include "lmboot/estimators.hpp"

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmboot {

enum class Method { unadjusted, raw, prefiltered_splw, prefiltered_true_d, kilian, hosking_asy, lee_ko };

inline constexpr Method all_methods[] = {Method::unadjusted, Method::raw,    Method::prefiltered_splw,
                                         Method::prefiltered_true_d, Method::kilian, Method::hosking_asy,
                                         Method::lee_ko};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::unadjusted: return "unadjusted";
    case Method::raw: return "raw";
    case Method::prefiltered_splw: return "prefiltered_splw";
    case Method::prefiltered_true_d: return "prefiltered_true_d";
    case Method::kilian: return "kilian";
    case Method::hosking_asy: return "hosking_asy";
    case Method::lee_ko: return "lee_ko";
  }
  return "?";
}

inline bool is_sieve(Method m) {
  return m == Method::raw || m == Method::prefiltered_splw || m == Method::prefiltered_true_d;
}

/// Kilian corrects AR coefficients, so it yields impulse responses only;
/// the analytic comparators exist for the autocorrelations only.
inline bool applies_to(Method m, StatKind kind) {
  if (m == Method::kilian) return kind == StatKind::irf;
  if (m == Method::hosking_asy || m == Method::lee_ko) return kind == StatKind::acf;
  return true;
}

struct GridPoint {
  double d = 0.0;
  double phi = 0.0;
};

/**
 * Monte Carlo design. Read from a flat `key = value` file; `#` starts a
 * comment. Lists are comma separated and grid points are written `d:phi`:
 *
 *   grid = 0.4:0.9, 0.2:0.6
 *   T = 500
 *   R = 300
 *   B = 299
 *   methods = unadjusted, raw, prefiltered_splw
 *   stats = irf
 *   table_lags = 1,3,6,9,12
 *   profile_max_lag = 99
 *   order_rule = logsq          # or aic
 *   seed = 20240601
 *   splw_exponent = 0.65
 */
struct ExperimentConfig {
  std::vector<GridPoint> grid;
  std::vector<std::size_t> T;
  std::size_t R = 0;
  std::size_t B = 0;
  std::vector<Method> methods;
  std::vector<StatKind> stats;
  std::vector<std::size_t> table_lags{1, 3, 6, 9, 12};
  std::size_t profile_max_lag = 99;
  OrderRule order_rule = OrderRule::fixed_log_sq;
  std::uint64_t seed = 0;
  double sigma2 = 1.0;
  FitMethod fit_method = FitMethod::burg;
  std::size_t panel_points = 201;
  double splw_exponent = 0.65;  ///< SPLW bandwidth N = floor(T^exponent)
  std::string out;  ///< optional; the command line takes precedence

  /// Largest lag any statistic is evaluated at.
  [[nodiscard]] std::size_t max_lag() const {
    std::size_t m = profile_max_lag;
    for (auto k : table_lags) m = std::max(m, k);
    return m;
  }

  [[nodiscard]] bool has_method(Method m) const {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
  }

  void validate() const {
    if (grid.empty()) throw std::invalid_argument("config: grid is empty");
    if (T.empty()) throw std::invalid_argument("config: T is empty");
    if (R < 2) throw std::invalid_argument("config: R must be at least 2");
    if (B < 2) throw std::invalid_argument("config: B must be at least 2");
    if (methods.empty()) throw std::invalid_argument("config: methods is empty");
    if (stats.empty()) throw std::invalid_argument("config: stats is empty");
    if (table_lags.empty()) throw std::invalid_argument("config: table_lags is empty");
    if (panel_points < 2) throw std::invalid_argument("config: panel_points must be at least 2");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("config: sigma2 must be positive");
    if (!(splw_exponent > 0.0 && splw_exponent < 1.0))
      throw std::invalid_argument("config: splw_exponent must lie in (0, 1)");
    for (auto k : table_lags)
      if (k < 1) throw std::invalid_argument("config: lags must be at least 1");
    for (auto t : T)
      if (max_lag() >= t) throw std::invalid_argument("config: lags must be at most T-1");
    for (const auto& g : grid) {
      if (!(std::abs(g.d) < 0.5)) throw std::invalid_argument("config: |d| must be < 0.5");
      if (!(std::abs(g.phi) < 1.0)) throw std::invalid_argument("config: |phi| must be < 1");
      if (g.d == 0.0 && has_method(Method::hosking_asy))
        throw std::invalid_argument("config: hosking_asy is undefined at d = 0");
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class V>
V parse_number(std::string_view text, std::string_view what) {
  V v{};
  const auto s = trim(text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("config: cannot parse " + std::string(what) + " from '" + s + "'");
  return v;
}

inline Method parse_method(std::string_view s) {
  for (auto m : all_methods)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("config: unknown method '" + std::string(s) + "'");
}

inline StatKind parse_stat(std::string_view s) {
  if (s == "acf") return StatKind::acf;
  if (s == "irf") return StatKind::irf;
  throw std::invalid_argument("config: unknown stat '" + std::string(s) + "'");
}

inline OrderRule parse_order_rule(std::string_view s) {
  if (s == "aic") return OrderRule::aic;
  if (s == "logsq" || s == "fixed_log_sq") return OrderRule::fixed_log_sq;
  throw std::invalid_argument("config: unknown order_rule '" + std::string(s) + "'");
}

inline FitMethod parse_fit_method(std::string_view s) {
  if (s == "burg") return FitMethod::burg;
  if (s == "yule_walker") return FitMethod::yule_walker;
  throw std::invalid_argument("config: unknown fit_method '" + std::string(s) + "'");
}

template <class V>
std::vector<V> parse_number_list(std::string_view s, std::string_view what) {
  std::vector<V> out;
  for (const auto& item : split_list(s)) out.push_back(parse_number<V>(item, what));
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, bool> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = detail::trim(std::string_view(body).substr(0, eq));
    const auto value = detail::trim(std::string_view(body).substr(eq + 1));
    if (seen[key]) throw std::invalid_argument("config: duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "grid") {
      for (const auto& item : detail::split_list(value)) {
        const auto parts = detail::split_list(item, ':');
        if (parts.size() != 2) throw std::invalid_argument("config: grid points are written d:phi");
        c.grid.push_back({detail::parse_number<double>(parts[0], "d"), detail::parse_number<double>(parts[1], "phi")});
      }
    } else if (key == "T") {
      c.T = detail::parse_number_list<std::size_t>(value, "T");
    } else if (key == "R") {
      c.R = detail::parse_number<std::size_t>(value, "R");
    } else if (key == "B") {
      c.B = detail::parse_number<std::size_t>(value, "B");
    } else if (key == "methods") {
      for (const auto& item : detail::split_list(value)) c.methods.push_back(detail::parse_method(item));
    } else if (key == "stats") {
      for (const auto& item : detail::split_list(value)) c.stats.push_back(detail::parse_stat(item));
    } else if (key == "table_lags") {
      c.table_lags = detail::parse_number_list<std::size_t>(value, "table_lags");
    } else if (key == "profile_max_lag") {
      c.profile_max_lag = detail::parse_number<std::size_t>(value, "profile_max_lag");
    } else if (key == "order_rule") {
      c.order_rule = detail::parse_order_rule(value);
    } else if (key == "seed") {
      c.seed = detail::parse_number<std::uint64_t>(value, "seed");
    } else if (key == "sigma2") {
      c.sigma2 = detail::parse_number<double>(value, "sigma2");
    } else if (key == "fit_method") {
      c.fit_method = detail::parse_fit_method(value);
    } else if (key == "panel_points") {
      c.panel_points = detail::parse_number<std::size_t>(value, "panel_points");
    } else if (key == "splw_exponent") {
      c.splw_exponent = detail::parse_number<double>(value, "splw_exponent");
    } else if (key == "out") {
      c.out = value;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_experiment_config(in);
}

}  // namespace lmboot
