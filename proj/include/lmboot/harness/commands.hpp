#pragma once

#include "lmboot/harness/config.hpp"
#include "lmboot/harness/experiment.hpp"
#include "lmboot/harness/output.hpp"
#include "lmboot/sieve.hpp"
#include "lmboot/simulate.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace lmboot {

struct SimulateOptions {
  double d = 0.0;
  double phi = 0.0;
  double sigma2 = 1.0;
  std::size_t T = 0;
  std::uint64_t seed = 0;
  std::string out;
};

inline void write_series_csv(const std::string& path, const std::string& header, std::span<const double> y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << '\n';
  for (double v : y) out << format_number(v) << '\n';
}

inline int run_simulate(const SimulateOptions& o) {
  ArfimaSpec spec{o.d, {}, o.sigma2};
  if (o.phi != 0.0) spec.ar = {o.phi};
  const auto y = simulate_gaussian({spec, o.T, o.seed});
  const std::string header = "y(d=" + format_number(o.d) + ";phi=" + format_number(o.phi) +
                             ";sigma2=" + format_number(o.sigma2) + ";T=" + std::to_string(o.T) +
                             ";seed=" + std::to_string(o.seed) + ")";
  write_series_csv(o.out, header, y);
  return 0;
}

/// First column of a CSV; a non-numeric first line is taken as a header.
inline Series read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Series y;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto field = detail::trim(std::string_view(line).substr(0, line.find(',')));
    if (field.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    const bool numeric = ec == std::errc{} && ptr == field.data() + field.size();
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("non-numeric value '" + field + "' in " + path);
    }
    first = false;
    y.push_back(v);
  }
  if (y.size() < 3) throw std::runtime_error("series in " + path + " is too short");
  return y;
}

struct BiasCorrectOptions {
  std::string input;
  StatKind stat = StatKind::irf;
  std::string method = "raw";  ///< raw | prefiltered-splw | prefiltered-d=<f> | kilian
  std::size_t B = 299;
  OrderRule order = OrderRule::fixed_log_sq;
  std::vector<std::size_t> lags{1, 3, 6, 9, 12};
  std::uint64_t seed = 0;
  double splw_exponent = 0.65;
  std::string out;
};

/// Writes k, estimate, adjusted, reference, bootstrap_mean (the last two are
/// nan for kilian, which corrects in coefficient space).
inline int run_bias_correct(const BiasCorrectOptions& o) {
  const auto y = read_series_csv(o.input);
  SieveConfig sc;
  sc.B = o.B;
  sc.order_rule = o.order;
  sc.seed = o.seed;
  sc.splw_exponent = o.splw_exponent;
  const StatRequest req{o.stat, o.lags, o.order};
  const auto obs = statistic(y, req);

  std::vector<double> adjusted, reference, boot_mean;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (o.method == "kilian") {
    if (o.stat != StatKind::irf) throw std::invalid_argument("kilian applies to --stat irf only");
    sc.validate();
    adjusted = kilian_adjust(y, sc, o.lags);
    reference.assign(o.lags.size(), nan);
    boot_mean.assign(o.lags.size(), nan);
  } else {
    if (o.method == "raw") {
      sc.method = SieveMethod::raw;
    } else if (o.method == "prefiltered-splw") {
      sc.method = SieveMethod::prefiltered_splw;
    } else if (o.method.rfind("prefiltered-d=", 0) == 0) {
      sc.method = SieveMethod::prefiltered_true_d;
      sc.true_d = detail::parse_number<double>(std::string_view(o.method).substr(14), "d");
    } else {
      throw std::invalid_argument("unknown method '" + o.method + "'");
    }
    const auto run = run_sieve_bootstrap(y, std::span(&req, 1), sc);
    for (const auto& d : run.dists[0]) {
      adjusted.push_back(bias_adjust(d, default_transform(o.stat)));
      reference.push_back(d.s_ref);
      boot_mean.push_back(std::accumulate(d.draws.begin(), d.draws.end(), 0.0) / static_cast<double>(d.draws.size()));
    }
  }

  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + o.out);
  out << "k,estimate,adjusted,reference,bootstrap_mean\n";
  for (std::size_t i = 0; i < o.lags.size(); ++i)
    out << o.lags[i] << ',' << format_number(obs[i]) << ',' << format_number(adjusted[i]) << ','
        << format_number(reference[i]) << ',' << format_number(boot_mean[i]) << '\n';
  return 0;
}

struct McOptions {
  std::string config;
  std::string out;
  std::size_t threads = 1;
};

inline int run_mc(const McOptions& o, std::ostream& diag = std::cerr) {
  auto cfg = load_experiment_config(o.config);
  const std::string out = o.out.empty() ? cfg.out : o.out;
  if (out.empty()) throw std::invalid_argument("no output directory: pass --out or set out in the config");
  const auto result = run_experiment(cfg, o.threads);
  emit_outputs(result, out);
  int status = 0;
  for (const auto& cell : result.cells) {
    if (!cell.failed) continue;
    status = 1;
    diag << "failed cell " << cell_directory_name(cell.point, cell.T) << ": " << cell.failures.size()
         << " failed method runs over " << cfg.R << " replications";
    if (!cell.failures.empty()) diag << "; first: " << cell.failures.front();
    diag << '\n';
  }
  return status;
}

}  // namespace lmboot
