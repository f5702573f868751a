#include "bpire/config.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "bpire/builtin.hpp"
#include "bpire/rng.hpp"

namespace bpire {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

double need_number(const json& j, const std::string& key,
                   const std::string& where) {
  if (!j.contains(key)) fail(where, "missing key '" + key + "'");
  if (!j[key].is_number()) fail(where + "." + key, "expected a number");
  return j[key].get<double>();
}

// Converts a byte offset from a json::parse_error into line:column.
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "line " << line << ", column " << col;
  return os.str();
}

}  // namespace

PgfLaw law_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "law must be an object");
  if (!j.contains("type") || !j["type"].is_string())
    fail(where, "law needs a string 'type'");
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "lf")
      return PgfLaw::linear_fractional(need_number(j, "m", where),
                                       need_number(j, "b", where));
    if (type == "poisson") return PgfLaw::poisson(need_number(j, "lambda", where));
    if (type == "geometric") return PgfLaw::geometric(need_number(j, "q", where));
    if (type == "table") {
      if (!j.contains("p") || !j["p"].is_array())
        fail(where, "table law needs an array 'p'");
      std::vector<double> p;
      for (const auto& v : j["p"]) {
        if (!v.is_number()) fail(where + ".p", "expected numbers");
        p.push_back(v.get<double>());
      }
      return PgfLaw::table(std::move(p));
    }
  } catch (const std::domain_error& e) {
    fail(where, e.what());
  }
  fail(where, "unknown law type '" + type + "'");
}

json law_to_json(const PgfLaw& law) {
  json j;
  switch (law.kind()) {
    case PgfLaw::Kind::LinearFractional:
      j["type"] = "lf";
      j["m"] = law.param_a();
      j["b"] = law.param_b();
      break;
    case PgfLaw::Kind::Poisson:
      j["type"] = "poisson";
      j["lambda"] = law.param_a();
      break;
    case PgfLaw::Kind::Geometric:
      j["type"] = "geometric";
      j["q"] = law.param_a();
      break;
    case PgfLaw::Kind::Table: {
      j["type"] = "table";
      j["p"] = std::vector<double>(law.table_probs().begin(),
                                   law.table_probs().end());
      break;
    }
  }
  return j;
}

EnvModel env_from_json(const json& j) {
  if (j.is_string()) return builtin_env(j.get<std::string>());
  if (!j.is_object()) fail("env", "expected a built-in name or an object");
  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
    fail("env.states", "expected a non-empty array");
  std::vector<EnvState> states;
  std::vector<double> probs;
  std::size_t idx = 0;
  for (const auto& st : j["states"]) {
    const std::string where = "env.states[" + std::to_string(idx) + "]";
    if (!st.is_object()) fail(where, "expected an object");
    if (!st.contains("offspring")) fail(where, "missing 'offspring'");
    if (!st.contains("immigration")) fail(where, "missing 'immigration'");
    PgfLaw f = law_from_json(st["offspring"], where + ".offspring");
    PgfLaw g = law_from_json(st["immigration"], where + ".immigration");
    try {
      states.emplace_back(std::move(f), std::move(g));
    } catch (const std::domain_error& e) {
      fail(where, e.what());
    }
    probs.push_back(need_number(st, "prob", where));
    ++idx;
  }
  std::string label = j.value("label", "");
  try {
    return EnvModel(std::move(states), std::move(probs), std::move(label));
  } catch (const std::invalid_argument& e) {
    fail("env", e.what());
  }
}

json env_to_json(const EnvModel& env) {
  json j;
  j["label"] = env.label;
  j["states"] = json::array();
  for (std::size_t i = 0; i < env.size(); ++i) {
    json st;
    st["offspring"] = law_to_json(env.states[i].offspring);
    st["immigration"] = law_to_json(env.states[i].immigration);
    st["prob"] = env.probs[i];
    j["states"].push_back(st);
  }
  return j;
}

std::string config_hash(const json& j) {
  const std::string canonical = j.dump();
  const std::uint64_t h = hash_tag(canonical);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  if (!j.contains("env")) fail("<root>", "missing 'env'");

  RunKnobs k;
  auto get_int = [&](const char* key, long long lo, long long hi,
                     long long dflt) -> long long {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) fail(key, "expected an integer");
    const long long v = j[key].get<long long>();
    if (v < lo || v > hi)
      fail(key, "value " + std::to_string(v) + " outside [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  };
  k.n_max = static_cast<int>(get_int("n_max", 0, 10000, k.n_max));
  k.survival_n = static_cast<int>(get_int("N", 0, 100000, 0));
  k.samples = static_cast<std::uint64_t>(
      get_int("samples", 100, 1000000000, static_cast<long long>(k.samples)));
  k.cap = static_cast<int>(get_int("cap", 1, 100000000, k.cap));
  k.theta_a = get_int("a", 1, 1000000, k.theta_a);
  k.budget = static_cast<std::uint64_t>(get_int(
      "budget", 1000, 4000000000ll, static_cast<long long>(k.budget)));
  k.seed = static_cast<std::uint64_t>(
      get_int("seed", 0, std::numeric_limits<long long>::max() - 1, 1));
  k.workers = static_cast<unsigned>(get_int("workers", 1, 256, k.workers));
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) fail("mode", "expected a string");
    k.kernel_mode = j["mode"].get<std::string>();
    if (k.kernel_mode != "auto" && k.kernel_mode != "exact" &&
        k.kernel_mode != "mc")
      fail("mode", "expected one of auto|exact|mc");
  }
  if (j.contains("window")) {
    if (!j["window"].is_array() || j["window"].size() != 2 ||
        !j["window"][0].is_number_integer() ||
        !j["window"][1].is_number_integer())
      fail("window", "expected [n_lo, n_hi]");
    const int lo = j["window"][0].get<int>();
    const int hi = j["window"][1].get<int>();
    if (lo < 1 || hi <= lo) fail("window", "need 1 <= n_lo < n_hi");
    k.window = std::make_pair(lo, hi);
  }

  ExperimentConfig cfg{env_from_json(j["env"]), k, config_hash(j)};
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": parse error at " +
                                locate(text, e.byte) + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace bpire
