#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "bpire/env.hpp"

namespace bpire {

// Numeric knobs of an experiment run. Every field has a documented range,
// validated on ingestion.
struct RunKnobs {
  int n_max = 12;                 // kernel horizon, >= 0
  int survival_n = 0;             // survival horizon; 0 = use n_max
  std::uint64_t samples = 100000; // >= 100
  std::string kernel_mode = "auto";  // auto | exact | mc
  int cap = 10000;                // >= 1
  std::optional<std::pair<int, int>> window;
  long long theta_a = 1;          // truncation argument for the A3 report
  std::uint64_t budget = 20000000;
  std::uint64_t seed = 1;
  unsigned workers = 4;           // 1..256
};

struct ExperimentConfig {
  EnvModel env;
  RunKnobs knobs;
  std::string config_hash;  // FNV-1a of the canonical JSON
};

PgfLaw law_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json law_to_json(const PgfLaw& law);

EnvModel env_from_json(const nlohmann::json& j);
nlohmann::json env_to_json(const EnvModel& env);

// Parses and validates a config file. Parse errors are reported with
// line/column positions; validation errors name the offending key.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Stable hex digest of the canonical serialized form.
std::string config_hash(const nlohmann::json& j);

}  // namespace bpire
