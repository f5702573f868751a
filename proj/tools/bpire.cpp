#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bpire/cli_ops.hpp"
#include "bpire/config.hpp"
#include "bpire/io.hpp"
#include "bpire/tail.hpp"
#include "bpire/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitAcceptance = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

bpire::ExperimentConfig load(const CommonArgs& args) {
  bpire::ExperimentConfig cfg = bpire::load_config(args.config_path);
  if (args.seed) cfg.knobs.seed = *args.seed;
  if (args.workers) {
    if (*args.workers < 1 || *args.workers > 256)
      throw std::invalid_argument("--workers must lie in [1, 256]");
    cfg.knobs.workers = *args.workers;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* c = cmd->add_option("--config", args.config_path,
                            "experiment config file (JSON)");
  if (config_required) c->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--workers", args.workers,
                  "override the config worker count (1..256)");
}

int dispatch(const std::string& name, const CommonArgs& args) {
  const bpire::ExperimentConfig cfg = load(args);
  bpire::CommandOutcome outcome;
  if (name == "classify")
    outcome = bpire::run_classify(cfg, args.out_dir);
  else if (name == "kernel")
    outcome = bpire::run_kernel(cfg, args.out_dir);
  else if (name == "tail")
    outcome = bpire::run_tail(cfg, args.out_dir);
  else if (name == "simulate")
    outcome = bpire::run_simulate(cfg, args.out_dir);
  else if (name == "report")
    outcome = bpire::run_report(cfg, args.out_dir);
  std::cout << outcome.message << "\n";
  return outcome.exit_code;
}

int run_verify(const CommonArgs& args) {
  bpire::VerifyOptions opt;
  if (args.seed) opt.seed = *args.seed;
  if (args.workers) opt.workers = *args.workers;
  const auto results = bpire::run_acceptance(opt);

  nlohmann::json out;
  out["criteria"] = nlohmann::json::array();
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s (%.1fs)%s\n", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.seconds,
                r.pass ? "" : (" -- " + r.detail).c_str());
    out["criteria"].push_back({{"id", r.id},
                               {"name", r.name},
                               {"pass", r.pass},
                               {"detail", r.detail},
                               {"seconds", r.seconds}});
  }
  const bool ok = bpire::all_pass(results);
  out["all_pass"] = ok;
  std::filesystem::create_directories(args.out_dir);
  bpire::RunMeta meta{"builtin-verify", opt.seed, opt.workers};
  bpire::write_json_file(
      (std::filesystem::path(args.out_dir) / "acceptance.json").string(), out,
      meta);
  return ok ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bpire: life-period tail analysis for subcritical branching processes "
      "with immigration in a random environment"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* classify = app.add_subcommand("classify", "regime classification");
  CLI::App* kernel = app.add_subcommand("kernel", "kernel series H, H*");
  CLI::App* tail =
      app.add_subcommand("tail", "survival recurrence, root certificate, fit");
  CLI::App* simulate =
      app.add_subcommand("simulate", "trajectory simulation oracle");
  CLI::App* report = app.add_subcommand("report", "merge artifacts and verdict");
  CLI::App* verify =
      app.add_subcommand("verify", "run the built-in verification suite");
  for (CLI::App* c : {classify, kernel, tail, simulate, report})
    add_common(c, args, true);
  add_common(verify, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : kExitOk;
  }

  try {
    if (verify->parsed()) return run_verify(args);
    for (CLI::App* c : {classify, kernel, tail, simulate, report})
      if (c->parsed()) return dispatch(c->get_name(), args);
    return kExitConfig;
  } catch (const bpire::UndecidedRootError& e) {
    std::cerr << "undecided: " << e.what() << "\n";
    return kExitUndecided;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
