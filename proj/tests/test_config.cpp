#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "bpire/cli_ops.hpp"
#include "bpire/config.hpp"
#include "bpire/io.hpp"

using namespace bpire;
using nlohmann::json;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("config");

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << content;
  return p.string();
}

}  // namespace

TEST_CASE("law literals") {
  CHECK(law_from_json(json::parse(R"({"type":"lf","m":0.5,"b":0.5})"), "t")
            .kind() == PgfLaw::Kind::LinearFractional);
  CHECK(law_from_json(json::parse(R"({"type":"poisson","lambda":1.0})"), "t")
            .mean() == 1.0);
  CHECK(law_from_json(json::parse(R"({"type":"geometric","q":0.4})"), "t")
            .kind() == PgfLaw::Kind::Geometric);
  CHECK(law_from_json(json::parse(R"({"type":"table","p":[0.5,0.5]})"), "t")
            .mean() == doctest::Approx(0.5));
  CHECK_THROWS_AS(law_from_json(json::parse(R"({"type":"zeta"})"), "t"),
                  std::invalid_argument);
  CHECK_THROWS_AS(law_from_json(json::parse(R"({"type":"lf","m":9,"b":0})"), "t"),
                  std::invalid_argument);

  // round trip
  const PgfLaw law = PgfLaw::table({0.25, 0.5, 0.25});
  const PgfLaw back = law_from_json(law_to_json(law), "t");
  CHECK(back.eval(0.37) == doctest::Approx(law.eval(0.37)).epsilon(1e-15));
}

TEST_CASE("config parsing and validation") {
  const std::string good = R"({
    "env": {"label": "demo",
            "states": [
              {"offspring": {"type":"lf","m":0.5,"b":0.5},
               "immigration": {"type":"poisson","lambda":1.0},
               "prob": 0.4},
              {"offspring": {"type":"geometric","q":0.3},
               "immigration": {"type":"table","p":[0.5,0.5]},
               "prob": 0.6}]},
    "n_max": 10, "N": 14, "samples": 5000, "seed": 42, "workers": 2,
    "cap": 500, "window": [3, 9], "mode": "exact"
  })";
  const ExperimentConfig cfg = load_config(write_temp("bpire_good.json", good));
  CHECK(cfg.env.size() == 2);
  CHECK(cfg.env.label == "demo");
  CHECK(cfg.knobs.n_max == 10);
  CHECK(cfg.knobs.survival_n == 14);
  CHECK(cfg.knobs.samples == 5000);
  CHECK(cfg.knobs.seed == 42);
  CHECK(cfg.knobs.workers == 2);
  CHECK(cfg.knobs.window.has_value());
  CHECK(cfg.knobs.window->first == 3);
  CHECK_FALSE(cfg.config_hash.empty());

  // built-in environment by name
  const ExperimentConfig b =
      config_from_json(json::parse(R"({"env":"E_weak"})"));
  CHECK(b.env.size() == 2);
  CHECK(b.env.label == "E_weak");

  // stable hash
  CHECK(config_hash(json::parse(good)) == config_hash(json::parse(good)));
}

TEST_CASE("config errors are precise") {
  // malformed JSON reports a position
  const std::string bad_syntax = "{\n \"env\": \"D1\",\n}";
  try {
    load_config(write_temp("bpire_bad1.json", bad_syntax));
    FAIL("expected parse failure");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }

  CHECK_THROWS_AS(config_from_json(json::parse(R"({"env":"NoSuch"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json(json::parse(R"({"env":"D1","samples":10})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json(json::parse(R"({"env":"D1","workers":512})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json(json::parse(R"({"env":"D1","window":[9,3]})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json(json::parse(
          R"({"env":{"states":[{"offspring":{"type":"lf","m":0.5,"b":0.5},
              "immigration":{"type":"poisson","lambda":1},"prob":0.5}]}})")),
      std::invalid_argument);  // probabilities sum to 0.5
}

TEST_CASE("artifact files embed provenance") {
  const ExperimentConfig cfg = config_from_json(json::parse(
      R"({"env":"D1","n_max":4,"N":4,"samples":2000,"cap":200,"seed":5,"workers":2})"));
  const fs::path dir = fs::temp_directory_path() / "bpire_cfg_test";
  fs::remove_all(dir);
  run_classify(cfg, dir.string());
  run_kernel(cfg, dir.string());
  run_simulate(cfg, dir.string());

  std::ifstream regime(dir / "regime.json");
  REQUIRE(regime.good());
  const json rj = json::parse(regime);
  CHECK(rj["meta"]["seed"] == 5);
  CHECK(rj["meta"]["workers"] == 2);
  CHECK(rj["meta"]["config_hash"] == cfg.config_hash);
  CHECK(rj["kind"] == "strongly");
  CHECK(rj["meta"]["versions"].contains("kernel"));

  std::ifstream kcsv(dir / "kernel.csv");
  REQUIRE(kcsv.good());
  std::string line;
  std::getline(kcsv, line);
  CHECK(line.find("config_hash=") != std::string::npos);
  std::getline(kcsv, line);  // gamma/delta comment
  std::getline(kcsv, line);
  CHECK(line == "n,H,H_se,Hstar,Hstar_se,method");

  std::ifstream scsv(dir / "samples.csv");
  REQUIRE(scsv.good());
  std::getline(scsv, line);
  CHECK(line.find("seed=5") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("tail command writes certificate and fit") {
  const ExperimentConfig cfg = config_from_json(json::parse(
      R"({"env":"D1","n_max":12,"N":12,"samples":2000,"cap":200,"seed":5,
          "workers":2,"window":[4,12]})"));
  const fs::path dir = fs::temp_directory_path() / "bpire_tail_test";
  fs::remove_all(dir);
  const CommandOutcome out = run_tail(cfg, dir.string());
  CHECK(out.exit_code == 0);
  std::ifstream cert(dir / "root_certificate.json");
  REQUIRE(cert.good());
  const json cj = json::parse(cert);
  CHECK(cj["case"] == "case1");
  CHECK(cj["r"].get<double>() > 1.0);
  CHECK(cj.contains("case1_constant"));

  std::ifstream fit(dir / "fit.json");
  REQUIRE(fit.good());
  const json fj = json::parse(fit);
  CHECK(fj["model"] == "pure-exponential");
  CHECK(fj["rate"].get<double>() > 0.0);
  CHECK(fj["rate"].get<double>() < 1.0);

  const CommandOutcome rep = run_report(cfg, dir.string());
  CHECK(rep.exit_code == 0);
  std::ifstream report(dir / "report.json");
  REQUIRE(report.good());
  const json rj = json::parse(report);
  CHECK(rj["verdict"]["decay"] == "exponential");
  fs::remove_all(dir);
}

TEST_SUITE_END();
