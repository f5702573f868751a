#include "bpire/builtin.hpp"

#include <cmath>
#include <stdexcept>

namespace bpire {

namespace {

EnvModel make_d1() {
  return EnvModel({EnvState(PgfLaw::linear_fractional(0.5, 0.5),
                            PgfLaw::poisson(1.0))},
                  {1.0}, "D1");
}

EnvModel make_pm1(double p_up, const std::string& label) {
  const double e = std::exp(1.0);
  std::vector<EnvState> states;
  states.emplace_back(PgfLaw::linear_fractional(e, 2.0), PgfLaw::poisson(1.0));
  states.emplace_back(PgfLaw::linear_fractional(1.0 / e, 0.5),
                      PgfLaw::poisson(1.0));
  return EnvModel(std::move(states), {p_up, 1.0 - p_up}, label);
}

EnvModel make_ln23(double p_up, double imm_lambda, const std::string& label) {
  std::vector<EnvState> states;
  states.emplace_back(PgfLaw::linear_fractional(2.0, 1.5),
                      PgfLaw::poisson(imm_lambda));
  states.emplace_back(PgfLaw::linear_fractional(1.0 / 3.0, 0.2),
                      PgfLaw::poisson(imm_lambda));
  return EnvModel(std::move(states), {p_up, 1.0 - p_up}, label);
}

EnvModel make_strong2() {
  std::vector<EnvState> states;
  states.emplace_back(PgfLaw::linear_fractional(1.5, 1.0),
                      PgfLaw::poisson(1.0));
  states.emplace_back(PgfLaw::linear_fractional(0.3, 0.45),
                      PgfLaw::poisson(1.0));
  return EnvModel(std::move(states), {0.3, 0.7}, "E_strong2");
}

}  // namespace

EnvModel builtin_env(const std::string& name) {
  if (name == "D1") return make_d1();
  if (name == "E_weak") return make_pm1(0.3, "E_weak");
  if (name == "E_inter")
    return make_pm1(1.0 / (1.0 + std::exp(2.0)), "E_inter");
  if (name == "E_weak2") return make_ln23(0.35, 1.0, "E_weak2");
  if (name == "E_strong2") return make_strong2();
  if (name == "E_case2") return make_ln23(0.35, 6.0, "E_case2");
  throw std::invalid_argument("unknown built-in environment: " + name);
}

std::vector<std::string> builtin_env_names() {
  return {"D1", "E_weak", "E_weak2", "E_inter", "E_strong2", "E_case2"};
}

}  // namespace bpire
