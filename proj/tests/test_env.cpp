#include <cmath>

#include <doctest.h>

#include "bpire/builtin.hpp"
#include "bpire/env.hpp"

using namespace bpire;

TEST_SUITE_BEGIN("env");

namespace {

EnvModel two_point(double p_up) {
  const double e = std::exp(1.0);
  std::vector<EnvState> states;
  states.emplace_back(PgfLaw::linear_fractional(e, 2.0), PgfLaw::poisson(1.0));
  states.emplace_back(PgfLaw::linear_fractional(1.0 / e, 0.5),
                      PgfLaw::poisson(1.0));
  return EnvModel(std::move(states), {p_up, 1.0 - p_up});
}

}  // namespace

TEST_CASE("state validation") {
  CHECK_THROWS_AS(EnvState(PgfLaw::table({1.0}), PgfLaw::poisson(1.0)),
                  std::domain_error);  // zero offspring mean
  CHECK_NOTHROW(EnvState(PgfLaw::linear_fractional(0.5, 0.5),
                         PgfLaw::table({1.0})));  // zero immigration is a law
  CHECK_THROWS_AS(EnvModel({}, {}), std::invalid_argument);
  std::vector<EnvState> one;
  one.emplace_back(PgfLaw::linear_fractional(0.5, 0.5), PgfLaw::poisson(1.0));
  CHECK_THROWS_AS(EnvModel(std::move(one), {0.9}), std::invalid_argument);
}

TEST_CASE("cumulant closed forms") {
  const double e = std::exp(1.0);
  const EnvModel env = two_point(0.3);
  auto [g, dg] = cumulant(env, 1.0);
  CHECK(g == doctest::Approx(0.3 * e + 0.7 / e).epsilon(1e-12));
  CHECK(dg == doctest::Approx(0.3 * e - 0.7 / e).epsilon(1e-12));

  auto [g0, dg0] = cumulant(env, 0.0);
  CHECK(g0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dg0 == doctest::Approx(env.mean_x()).epsilon(1e-12));

  const EnvModel env2 = two_point(0.1);
  auto [g1, dg1] = cumulant(env2, 1.0);
  CHECK(g1 == doctest::Approx(0.1 * e + 0.9 / e).epsilon(1e-12));
  CHECK(dg1 == doctest::Approx(0.1 * e - 0.9 / e).epsilon(1e-12));
}

TEST_CASE("cumulant convexity on a grid") {
  const EnvModel env = builtin_env("E_strong2");
  for (int i = 0; i < 20; ++i) {
    const double t0 = -1.0 + 0.1 * i;
    const double t1 = t0 + 0.2;
    const double mid = cumulant(env, 0.5 * (t0 + t1)).first;
    const double avg =
        0.5 * (cumulant(env, t0).first + cumulant(env, t1).first);
    CHECK(mid <= avg + 1e-12);
  }
}

TEST_CASE("classification closed forms") {
  const Regime weak = classify(builtin_env("E_weak"));
  CHECK(weak.kind == RegimeKind::Weakly);
  REQUIRE(weak.beta.has_value());
  CHECK(*weak.beta == doctest::Approx(0.5 * std::log(7.0 / 3.0)).epsilon(1e-12));
  CHECK(weak.gamma == doctest::Approx(2.0 * std::sqrt(0.21)).epsilon(1e-12));
  CHECK(weak.delta == *weak.beta);

  const Regime inter = classify(builtin_env("E_inter"));
  CHECK(inter.kind == RegimeKind::Intermediate);
  CHECK(inter.delta == 1.0);
  CHECK(inter.gamma == doctest::Approx(1.0 / std::cosh(1.0)).epsilon(1e-12));

  const Regime strong = classify(builtin_env("E_strong2"));
  CHECK(strong.kind == RegimeKind::Strongly);
  CHECK(strong.delta == 1.0);
  CHECK(strong.gamma == doctest::Approx(0.66).epsilon(1e-13));
  CHECK(cumulant(builtin_env("E_strong2"), 1.0).second ==
        doctest::Approx(-0.070375).epsilon(1e-4));
}

TEST_CASE("classification rejects non-subcritical environments") {
  std::vector<EnvState> states;
  states.emplace_back(PgfLaw::linear_fractional(1.5, 1.0), PgfLaw::poisson(1.0));
  const EnvModel env(std::move(states), {1.0});
  CHECK_THROWS_AS(classify(env), std::domain_error);
}

TEST_CASE("tilt") {
  const EnvModel weak = builtin_env("E_weak");
  const Regime regime = classify(weak);
  const EnvModel tilted = tilt(weak, regime.delta);
  CHECK(tilted.probs[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(tilted.mean_x()) <= 1e-12);

  // strongly subcritical stays subcritical under its tilt
  const EnvModel strong = builtin_env("E_strong2");
  CHECK(tilt(strong, 1.0).mean_x() < 0.0);

  // intermediate: tilted walk is mean-zero
  const EnvModel inter = builtin_env("E_inter");
  CHECK(std::abs(tilt(inter, 1.0).mean_x()) <= 1e-12);
  CHECK(tilt(inter, 1.0).probs[0] == doctest::Approx(0.5).epsilon(1e-12));

  // single-state tilt is the identity on probabilities
  const EnvModel d1 = builtin_env("D1");
  CHECK(tilt(d1, 1.0).probs[0] == 1.0);

  // roundtrip
  const EnvModel back = tilt(tilted, -regime.delta);
  for (std::size_t i = 0; i < weak.size(); ++i)
    CHECK(back.probs[i] == doctest::Approx(weak.probs[i]).epsilon(1e-12));
}

TEST_CASE("classify invariant under permutation and state splitting") {
  const double e = std::exp(1.0);
  std::vector<EnvState> states;
  states.emplace_back(PgfLaw::linear_fractional(e, 2.0), PgfLaw::poisson(1.0));
  states.emplace_back(PgfLaw::linear_fractional(1.0 / e, 0.5),
                      PgfLaw::poisson(1.0));
  const EnvModel env(states, {0.3, 0.7});
  const Regime base = classify(env);

  std::vector<EnvState> swapped = {states[1], states[0]};
  const Regime perm = classify(EnvModel(std::move(swapped), {0.7, 0.3}));
  CHECK(perm.kind == base.kind);
  CHECK(*perm.beta == doctest::Approx(*base.beta).epsilon(1e-13));
  CHECK(perm.gamma == doctest::Approx(base.gamma).epsilon(1e-13));

  std::vector<EnvState> split = {states[0], states[0], states[1]};
  const Regime sp = classify(EnvModel(std::move(split), {0.15, 0.15, 0.7}));
  CHECK(sp.kind == base.kind);
  CHECK(*sp.beta == doctest::Approx(*base.beta).epsilon(1e-13));
  CHECK(sp.gamma == doctest::Approx(base.gamma).epsilon(1e-13));
}

TEST_CASE("hypothesis report") {
  const HypothesisReport weak = hypothesis_report(builtin_env("E_weak"), 1);
  CHECK(weak.lattice);
  CHECK(weak.a2_status == "FLAG");
  CHECK(weak.span == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(weak.a4_status == "PASS");
  CHECK(weak.a4_value ==
        doctest::Approx(1.0 / (1.0 - std::exp(-1.0))).epsilon(1e-9));
  CHECK(weak.a3_status == "PASS");
  CHECK(weak.tilted_measure);

  // x = ln 2.5 and ln 0.3: irrational ratio, the span search fails
  std::vector<EnvState> states;
  states.emplace_back(PgfLaw::linear_fractional(2.5, 2.0), PgfLaw::poisson(1.0));
  states.emplace_back(PgfLaw::linear_fractional(0.3, 0.4), PgfLaw::poisson(1.0));
  const HypothesisReport nl =
      hypothesis_report(EnvModel(std::move(states), {0.3, 0.7}), 1);
  CHECK_FALSE(nl.lattice);
  CHECK(nl.a2_status == "PASS");

  // immigration identically zero: A4 undefined
  std::vector<EnvState> dead;
  dead.emplace_back(PgfLaw::linear_fractional(0.5, 0.5), PgfLaw::table({1.0}));
  const HypothesisReport a4 =
      hypothesis_report(EnvModel(std::move(dead), {1.0}), 1);
  CHECK(a4.a4_status == "FAIL");
}

TEST_CASE("immigration moments") {
  const EnvModel weak = builtin_env("E_weak");
  CHECK(mean_immigration(weak) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean_immigration_normalized(weak) ==
        doctest::Approx(1.0 / (1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(immigration_front(weak, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(immigration_front(weak, 0.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
}

TEST_SUITE_END();
