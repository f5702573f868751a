#include <cmath>

#include <doctest.h>

#include "bpire/builtin.hpp"
#include "bpire/harmonic.hpp"

using namespace bpire;

TEST_SUITE_BEGIN("harmonic");

namespace {

EnvModel tilted_weak() {
  const EnvModel weak = builtin_env("E_weak");
  return tilt(weak, *classify(weak).beta);
}

}  // namespace

TEST_CASE("renewal functions are exact at zero") {
  const EnvModel env = tilted_weak();
  RenewalOptions opt;
  const RenewalEstimate u0 = renewal_U(env, 0.0, opt);
  CHECK(u0.value == 1.0);
  CHECK(u0.se == 0.0);
  const RenewalEstimate v0 = renewal_V(env, 0.0, opt);
  CHECK(v0.value == 1.0);
  CHECK(v0.se == 0.0);
}

TEST_CASE("mean-nonzero walks are rejected") {
  const EnvModel weak = builtin_env("E_weak");  // E[X] = -0.4
  RenewalOptions opt;
  CHECK_THROWS_AS(renewal_U(weak, 1.0, opt), std::domain_error);
  CHECK_THROWS_AS(renewal_V(weak, -1.0, opt), std::domain_error);
  CHECK_THROWS_AS(harmonic_check(RenewalKind::U, weak, 0.0, opt),
                  std::domain_error);
}

TEST_CASE("ladder oracle on the fair +-1 walk") {
  // descending ladder heights are -1 a.s., so U(x) = 1 + floor(x);
  // the reflected walk gives V(-x) = 1 + floor(x)
  const EnvModel env = tilted_weak();
  RenewalOptions opt;
  opt.samples = 8000;
  opt.step_cap = 1000000;
  opt.seed = 31;
  opt.workers = 4;

  const RenewalEstimate u1 = renewal_U(env, 1.0, opt);
  CHECK(std::abs(u1.value - 2.0) <= 3.0 * u1.se);
  const RenewalEstimate u2 = renewal_U(env, 2.0, opt);
  CHECK(std::abs(u2.value - 3.0) <= 3.0 * u2.se);
  CHECK(u2.cap_hit_fraction < 0.01);

  const RenewalEstimate v1 = renewal_V(env, -1.0, opt);
  CHECK(std::abs(v1.value - 2.0) <= 3.0 * v1.se);
  const RenewalEstimate v2 = renewal_V(env, -2.0, opt);
  CHECK(std::abs(v2.value - 3.0) <= 3.0 * v2.se);
}

TEST_CASE("ladder and horizon-summation estimators agree") {
  const EnvModel env = tilted_weak();
  RenewalOptions opt;
  opt.samples = 8000;
  opt.step_cap = 1000000;
  opt.seed = 37;
  opt.workers = 4;
  for (double x : {1.0, 2.0}) {
    const RenewalEstimate ladder = renewal_U(env, x, opt);
    const RenewalEstimate series =
        renewal_U_series(env, x, 10000, 8000, 41, 4);
    const double combined =
        std::sqrt(ladder.se * ladder.se + series.se * series.se);
    // the series truncation at horizon 1e4 biases a shade low; allow it
    const double tail_allowance = 0.8 * (x + 1.0) / std::sqrt(10000.0);
    CHECK(std::abs(ladder.value - series.value) <=
          3.0 * combined + tail_allowance);
  }
}

TEST_CASE("harmonicity residuals vanish within noise") {
  const EnvModel env = tilted_weak();
  RenewalOptions opt;
  opt.samples = 8000;
  opt.step_cap = 1000000;
  opt.seed = 43;
  opt.workers = 4;
  for (double x : {0.0, 1.0, 2.0}) {
    const HarmonicResidual h = harmonic_check(RenewalKind::U, env, x, opt);
    CHECK(std::abs(h.residual) <= 3.0 * h.se);
  }
  for (double x : {0.0, -1.0, -2.0}) {
    const HarmonicResidual h = harmonic_check(RenewalKind::V, env, x, opt);
    CHECK(std::abs(h.residual) <= 3.0 * h.se);
  }
}

TEST_CASE("harmonic identity closed form at x = 0") {
  // E[U(X); X >= 0] = U(1)/2 for the fair +-1 walk, which must equal U(0) = 1
  const EnvModel env = tilted_weak();
  RenewalOptions opt;
  opt.samples = 20000;
  opt.step_cap = 1000000;
  opt.seed = 47;
  opt.workers = 4;
  const HarmonicResidual h = harmonic_check(RenewalKind::U, env, 0.0, opt);
  CHECK(h.rhs == 1.0);
  CHECK(h.lhs == doctest::Approx(1.0).epsilon(0.03));
}

TEST_SUITE_END();
