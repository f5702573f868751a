#pragma once

#include <cstdint>

#include "bpire/env.hpp"

namespace bpire {

// Renewal-function estimate for the oscillating (tilted, mean-zero) walk:
//   U(x) = 1 + sum_n P(S_n >= -x, M_n < 0),  x >= 0,
//   V(x) = 1 + sum_n P(S_n < -x,  L_n >= 0), x <= 0.
// By walk duality both series count ladder epochs, which is how the primary
// estimator samples them.
struct RenewalEstimate {
  double x = 0.0;
  double value = 1.0;
  double se = 0.0;
  long long step_cap = 0;
  double cap_hit_fraction = 0.0;
  std::uint64_t paths = 0;
};

struct RenewalOptions {
  std::uint64_t samples = 20000;
  long long step_cap = 1000000;  // steps simulated per path
  std::uint64_t seed = 1;
  unsigned workers = 4;
};

// Counts strict descending ladder points with height >= -x; a path stops
// once a ladder point falls below -x (later ladder heights only decrease).
// Requires |E[X]| <= 1e-10 for the supplied model.
RenewalEstimate renewal_U(const EnvModel& env_tilted, double x,
                          const RenewalOptions& opt);

// Mirror image: weak ascending ladder points with height < -x (x <= 0).
RenewalEstimate renewal_V(const EnvModel& env_tilted, double x,
                          const RenewalOptions& opt);

// Secondary estimator summing the defining series up to a horizon; used to
// cross-check the ladder estimator.
RenewalEstimate renewal_U_series(const EnvModel& env_tilted, double x,
                                 long long horizon, std::uint64_t samples,
                                 std::uint64_t seed, unsigned workers);

enum class RenewalKind { U, V };

struct HarmonicResidual {
  RenewalKind which = RenewalKind::U;
  double x = 0.0;
  double lhs = 0.0;       // E[U(x+X); x+X >= 0]  (resp. V, x+X < 0)
  double rhs = 0.0;       // U(x) (resp. V(x))
  double residual = 0.0;  // lhs - rhs
  double se = 0.0;        // propagated standard error
};

// Tests the harmonicity identity by mixing renewal estimates over the
// one-step law of the tilted walk.
HarmonicResidual harmonic_check(RenewalKind which, const EnvModel& env_tilted,
                                double x, const RenewalOptions& opt);

}  // namespace bpire
