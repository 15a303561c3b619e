#include "lmboot/harness/commands.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <thread>

int main(int argc, char** argv) {
  CLI::App app{"Long-memory sieve bootstrap bias correction"};
  app.set_version_flag("--version", std::string(lmboot::software_version));
  app.require_subcommand(1);

  lmboot::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a Gaussian ARFIMA(1,d,0) series to CSV");
  simulate->add_option("--d", sim.d, "Fractional index, |d| < 0.5")->required();
  simulate->add_option("--phi", sim.phi, "AR(1) coefficient, |phi| < 1")->required();
  simulate->add_option("--sigma2", sim.sigma2, "Innovation variance")->default_val(1.0);
  simulate->add_option("--T", sim.T, "Sample size")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--out", sim.out, "Output CSV")->required();

  lmboot::BiasCorrectOptions bc;
  std::string stat = "irf", order = "logsq";
  auto* bias = app.add_subcommand("bias-correct", "Bootstrap bias-adjust the ACF or IRF of a series");
  bias->add_option("--input", bc.input, "Input CSV (first column)")->required()->check(CLI::ExistingFile);
  bias->add_option("--stat", stat, "acf or irf")->check(CLI::IsMember({"acf", "irf"}))->default_val("irf");
  bias->add_option("--method", bc.method, "raw | prefiltered-splw | prefiltered-d=<f> | kilian")->default_val("raw");
  bias->add_option("--B", bc.B, "Bootstrap resamples")->default_val(299);
  bias->add_option("--order", order, "aic or logsq")->check(CLI::IsMember({"aic", "logsq"}))->default_val("logsq");
  bias->add_option("--lags", bc.lags, "Comma-separated lags")->delimiter(',')->default_str("1,3,6,9,12");
  bias->add_option("--seed", bc.seed, "RNG seed")->default_val(0);
  bias->add_option("--splw-exponent", bc.splw_exponent, "SPLW bandwidth exponent: N = floor(T^e)")
      ->check(CLI::Range(0.01, 0.99))
      ->default_val(0.65);
  bias->add_option("--out", bc.out, "Output CSV")->required();

  lmboot::McOptions mc;
  mc.threads = std::max(1u, std::thread::hardware_concurrency());
  auto* mcc = app.add_subcommand("mc", "Run a Monte Carlo experiment from a key = value config");
  mcc->add_option("--config", mc.config, "Config file")->required()->check(CLI::ExistingFile);
  mcc->add_option("--out", mc.out, "Output directory (overrides the config)");
  mcc->add_option("--threads", mc.threads, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return lmboot::run_simulate(sim);
    if (*bias) {
      bc.stat = stat == "acf" ? lmboot::StatKind::acf : lmboot::StatKind::irf;
      bc.order = order == "aic" ? lmboot::OrderRule::aic : lmboot::OrderRule::fixed_log_sq;
      return lmboot::run_bias_correct(bc);
    }
    if (*mcc) return lmboot::run_mc(mc);
  } catch (const std::exception& e) {
    std::cerr << "lmboot: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
