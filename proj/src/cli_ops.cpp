#include "bpire/cli_ops.hpp"

#include <filesystem>
#include <fstream>

namespace bpire {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunMeta meta_of(const ExperimentConfig& cfg) {
  return RunMeta{cfg.config_hash, cfg.knobs.seed, cfg.knobs.workers};
}

void ensure_dir(const std::string& out_dir) {
  fs::create_directories(out_dir);
}

std::string path_in(const std::string& out_dir, const std::string& name) {
  return (fs::path(out_dir) / name).string();
}

McOptions mc_options(const ExperimentConfig& cfg) {
  return McOptions{cfg.knobs.samples, cfg.knobs.seed, cfg.knobs.workers};
}

std::uint64_t ipow_sat(std::uint64_t base, unsigned exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

}  // namespace

KernelSeries kernel_for_config(const ExperimentConfig& cfg,
                               const Regime& regime, int n_max) {
  const auto& k = cfg.knobs;
  if (k.kernel_mode == "exact")
    return kernel_exact(cfg.env, regime, n_max, k.budget);
  if (k.kernel_mode == "mc")
    return kernel_mc_series(cfg.env, regime, n_max, KernelMethod::McTilted,
                            mc_options(cfg));
  const std::uint64_t cost =
      ipow_sat(cfg.env.size(), static_cast<unsigned>(n_max) + 1, k.budget);
  if (cost <= k.budget) return kernel_exact(cfg.env, regime, n_max, k.budget);
  return kernel_mc_series(cfg.env, regime, n_max, KernelMethod::McTilted,
                          mc_options(cfg));
}

CommandOutcome run_classify(const ExperimentConfig& cfg,
                            const std::string& out_dir) {
  ensure_dir(out_dir);
  const Regime regime = classify(cfg.env, cfg.knobs.theta_a);
  json j = regime_to_json(regime);
  j["env"] = env_to_json(cfg.env);
  write_json_file(path_in(out_dir, "regime.json"), j, meta_of(cfg));
  return {0, std::string("regime: ") + to_string(regime.kind)};
}

CommandOutcome run_kernel(const ExperimentConfig& cfg,
                          const std::string& out_dir) {
  ensure_dir(out_dir);
  const Regime regime = classify(cfg.env, cfg.knobs.theta_a);
  const KernelSeries ks = kernel_for_config(cfg, regime, cfg.knobs.n_max);
  write_text_file(path_in(out_dir, "kernel.csv"), kernel_csv(ks, meta_of(cfg)));
  return {0, "kernel series written to kernel.csv"};
}

CommandOutcome run_tail(const ExperimentConfig& cfg,
                        const std::string& out_dir) {
  ensure_dir(out_dir);
  const Regime regime = classify(cfg.env, cfg.knobs.theta_a);
  const int survival_n =
      cfg.knobs.survival_n > 0 ? cfg.knobs.survival_n : cfg.knobs.n_max;
  const KernelSeries ks = kernel_for_config(cfg, regime, survival_n - 1);
  write_text_file(path_in(out_dir, "kernel.csv"), kernel_csv(ks, meta_of(cfg)));

  const double r1_value = r1(cfg.env);
  const SurvivalCurve curve = survival_from_kernel(ks, r1_value, survival_n);
  write_text_file(path_in(out_dir, "survival.csv"),
                  survival_csv(curve, meta_of(cfg)));

  CommandOutcome outcome{0, "tail artifacts written"};
  json cert_json;
  try {
    const RootCertificate cert = find_root(ks);
    cert_json = certificate_to_json(cert);
    if (cert.kind == RootCase::Case1) {
      cert_json["case1_constant"] = case1_constant(ks, r1_value, cert.r);
    }
  } catch (const UndecidedRootError& e) {
    cert_json["case"] = "undecided";
    cert_json["error"] = e.what();
    cert_json["required_n"] = e.required_n;
    outcome = {2, std::string("root certificate undecided: ") + e.what()};
  }
  write_json_file(path_in(out_dir, "root_certificate.json"), cert_json,
                  meta_of(cfg));

  // Fit on the documented window (default middle third). The power model
  // applies in the weak regime when no root certificate was produced.
  json fit_json_out;
  try {
    const bool have_root = cert_json["case"] == "case1";
    if (have_root || regime.kind != RegimeKind::Weakly) {
      fit_json_out =
          fit_to_json(decay_fit(curve, FitModel::PureExponential,
                                cfg.knobs.window, std::nullopt));
    } else {
      fit_json_out =
          fit_to_json(decay_fit(curve, FitModel::ExponentialTimesPower,
                                cfg.knobs.window, regime.gamma));
    }
  } catch (const std::exception& e) {
    fit_json_out["error"] = e.what();
  }
  write_json_file(path_in(out_dir, "fit.json"), fit_json_out, meta_of(cfg));
  return outcome;
}

CommandOutcome run_simulate(const ExperimentConfig& cfg,
                            const std::string& out_dir) {
  ensure_dir(out_dir);
  SimOptions opt;
  opt.trajectories = cfg.knobs.samples;
  opt.cap = cfg.knobs.cap;
  opt.seed = cfg.knobs.seed;
  opt.workers = cfg.knobs.workers;
  const auto samples = simulate_many(cfg.env, opt);
  write_text_file(path_in(out_dir, "samples.csv"),
                  samples_csv(samples, meta_of(cfg)));
  const int survival_n =
      cfg.knobs.survival_n > 0 ? cfg.knobs.survival_n : cfg.knobs.n_max;
  const SurvivalCurve curve = empirical_survival(samples, survival_n);
  write_text_file(path_in(out_dir, "empirical_survival.csv"),
                  survival_csv(curve, meta_of(cfg)));
  return {0, "simulation artifacts written"};
}

CommandOutcome run_report(const ExperimentConfig& cfg,
                          const std::string& out_dir) {
  ensure_dir(out_dir);
  json report;
  int exit_code = 0;
  auto merge_json = [&](const char* file, const char* key) {
    const std::string p = path_in(out_dir, file);
    std::ifstream in(p);
    if (!in) return;
    try {
      report[key] = json::parse(in);
    } catch (const json::parse_error&) {
      report[key] = {{"error", "unparseable " + std::string(file)}};
    }
  };
  merge_json("regime.json", "regime");
  merge_json("root_certificate.json", "certificate");
  merge_json("fit.json", "fit");

  json verdict;
  const std::string kind =
      report.contains("regime") ? report["regime"].value("kind", "") : "";
  const std::string root_case = report.contains("certificate")
                                    ? report["certificate"].value("case", "")
                                    : "";
  if (root_case == "case1") {
    verdict["decay"] = "exponential";
    if (report["certificate"].contains("r") &&
        !report["certificate"]["r"].is_null()) {
      const double r = report["certificate"]["r"].get<double>();
      verdict["rate"] = 1.0 / r;
    }
  } else if (root_case == "case2" && kind == "weakly") {
    verdict["decay"] = "exponential-times-power";
    verdict["base"] = report["regime"].value("gamma", 0.0);
    verdict["power_theory"] = -1.5;
  } else if (root_case == "case3-boundary") {
    verdict["decay"] = "boundary";
  } else if (root_case == "undecided") {
    verdict["decay"] = "undecided";
    exit_code = 2;
  } else {
    verdict["decay"] = "unknown";
  }
  if (report.contains("fit") && report["fit"].contains("rate"))
    verdict["fitted"] = report["fit"];
  report["verdict"] = verdict;
  write_json_file(path_in(out_dir, "report.json"), report, meta_of(cfg));
  return {exit_code, "report.json written"};
}

}  // namespace bpire
