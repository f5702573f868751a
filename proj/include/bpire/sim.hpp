#pragma once

#include <cstdint>
#include <vector>

#include "bpire/env.hpp"
#include "bpire/tail.hpp"

namespace bpire {

struct LifePeriodSample {
  int zeta = 0;             // first n >= 1 with W_n = 0, or the cap
  bool censored = false;    // trajectory reached the cap still alive
  long long peak = 0;       // max population seen
  std::uint64_t stream_key = 0;  // reproducibility token
};

// One trajectory of the stopped process: W_0 is drawn from the initial
// immigration law conditioned positive (state drawn once, then rejection
// within the state); each generation draws the environment state, the
// offspring sum T_n of the W_{n-1} parents, and immigrants only if T_n > 0.
LifePeriodSample simulate_life_period(const EnvModel& env, Rng& rng, int cap);

struct SimOptions {
  std::uint64_t trajectories = 100000;
  int cap = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 4;
};

std::vector<LifePeriodSample> simulate_many(const EnvModel& env,
                                            const SimOptions& opt);

// Empirical tail with 3-sigma half-widths; censored samples count as
// zeta > cap >= n. Requires N below every cap and >= 100 uncensored samples.
SurvivalCurve empirical_survival(const std::vector<LifePeriodSample>& samples,
                                 int count);

// One associated-walk path digest.
struct WalkSample {
  std::vector<double> path;  // S_0..S_n
  double min_l = 0.0;        // min over S_0..S_n
  double max_m = 0.0;        // max over S_1..S_n
  int tau = 0;               // first index attaining the minimum
};

WalkSample sample_walk(const EnvModel& env, Rng& rng, int n);

struct WalkStats {
  int n = 0;
  std::uint64_t samples = 0;
  double theta = 1.0;
  bool tilted = false;
  double mean_s = 0.0;
  double mean_min = 0.0;
  double mean_max = 0.0;
  double mean_tau = 0.0;
  double prob_max_neg = 0.0;  // P(M_n < 0)
  double exp_pos = 0.0;       // E[e^{theta S_n}; M_n < 0]
  double exp_pos_se = 0.0;
  double exp_neg = 0.0;       // E[e^{-theta S_n}; L_n >= 0]
  double exp_neg_se = 0.0;
};

struct WalkOptions {
  std::uint64_t samples = 100000;
  double theta = 1.0;
  bool tilted = false;
  std::uint64_t seed = 1;
  unsigned workers = 4;
};

WalkStats walk_stats(const EnvModel& env, int n, const WalkOptions& opt);

}  // namespace bpire
