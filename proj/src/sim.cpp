#include "bpire/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bpire/parallel.hpp"

namespace bpire {

namespace {

constexpr long long kPopulationLimit = 1ll << 50;

long long draw_initial(const EnvModel& env, Rng& rng) {
  const std::size_t state = env.sample_state(rng);
  const PgfLaw& g = env.states[state].immigration;
  if (g.eval(0.0) >= 1.0)
    throw std::domain_error(
        "simulate_life_period: initial law undefined (G(0) = 1 in a state)");
  for (int tries = 0; tries < 1 << 22; ++tries) {
    const long long w = g.sample(rng);
    if (w > 0) return w;
  }
  throw std::runtime_error("simulate_life_period: initial rejection stalled");
}

}  // namespace

LifePeriodSample simulate_life_period(const EnvModel& env, Rng& rng, int cap) {
  if (cap < 1) throw std::invalid_argument("simulate_life_period: cap < 1");
  for (const auto& st : env.states)
    if (st.immigration.eval(0.0) >= 1.0)
      throw std::domain_error(
          "simulate_life_period: a state has G(0) = 1, initial law undefined");

  LifePeriodSample out;
  out.stream_key = rng.key();
  long long w = draw_initial(env, rng);
  out.peak = w;
  for (int n = 1; n <= cap; ++n) {
    const std::size_t state = env.sample_state(rng);
    const EnvState& st = env.states[state];
    const long long t = st.offspring.sample_sum(w, rng);
    if (t == 0) {
      out.zeta = n;
      out.censored = false;
      return out;
    }
    w = t + st.immigration.sample(rng);
    if (w > kPopulationLimit)
      throw std::overflow_error("simulate_life_period: population overflow");
    if (w > out.peak) out.peak = w;
  }
  out.zeta = cap;
  out.censored = true;
  return out;
}

std::vector<LifePeriodSample> simulate_many(const EnvModel& env,
                                            const SimOptions& opt) {
  const auto blocks = partition_blocks(opt.trajectories, opt.workers);
  const std::uint64_t tag = hash_tag("simulate_life_period");
  auto parts = run_blocks<std::vector<LifePeriodSample>>(
      opt.workers, [&](unsigned b) {
        std::vector<LifePeriodSample> v;
        v.reserve(blocks[b].count());
        for (std::uint64_t i = 0; i < blocks[b].count(); ++i) {
          Rng rng(derive_stream(opt.seed, tag, b, i));
          v.push_back(simulate_life_period(env, rng, opt.cap));
        }
        return v;
      });
  std::vector<LifePeriodSample> all;
  all.reserve(opt.trajectories);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

SurvivalCurve empirical_survival(const std::vector<LifePeriodSample>& samples,
                                 int count) {
  if (count < 1) throw std::invalid_argument("empirical_survival: N < 1");
  std::uint64_t uncensored = 0;
  for (const auto& s : samples) {
    if (!s.censored) ++uncensored;
    if (s.censored && count >= s.zeta)
      throw std::invalid_argument(
          "empirical_survival: N must stay below the trajectory cap");
  }
  if (uncensored < 100)
    throw std::invalid_argument(
        "empirical_survival: need at least 100 uncensored samples");

  const double total = static_cast<double>(samples.size());
  std::vector<std::uint64_t> alive(static_cast<std::size_t>(count) + 1, 0);
  for (const auto& s : samples) {
    // zeta > n for all n < zeta; censored samples exceed every n <= count
    const int upto = s.censored ? count : std::min(count, s.zeta - 1);
    for (int n = 1; n <= upto; ++n) ++alive[static_cast<std::size_t>(n)];
  }
  SurvivalCurve curve;
  curve.points.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) {
    const double p = static_cast<double>(alive[static_cast<std::size_t>(n)]) / total;
    curve.points.push_back(
        {n, p, 3.0 * std::sqrt(p * (1.0 - p) / total), Provenance::Empirical});
  }
  return curve;
}

WalkSample sample_walk(const EnvModel& env, Rng& rng, int n) {
  if (n < 1) throw std::invalid_argument("sample_walk: n < 1");
  WalkSample w;
  w.path.resize(static_cast<std::size_t>(n) + 1);
  w.path[0] = 0.0;
  double s = 0.0;
  double lmin = 0.0, mmax = -std::numeric_limits<double>::infinity();
  int tau = 0;
  for (int i = 1; i <= n; ++i) {
    s += env.states[env.sample_state(rng)].x;
    w.path[static_cast<std::size_t>(i)] = s;
    if (s < lmin) {
      lmin = s;
      tau = i;
    }
    if (s > mmax) mmax = s;
  }
  w.min_l = lmin;
  w.max_m = mmax;
  w.tau = tau;
  return w;
}

WalkStats walk_stats(const EnvModel& env, int n, const WalkOptions& opt) {
  if (n < 1) throw std::invalid_argument("walk_stats: n < 1");
  const EnvModel sampler =
      opt.tilted ? tilt(env, classify(env).delta) : env;
  const auto blocks = partition_blocks(opt.samples, opt.workers);
  const std::uint64_t tag = hash_tag("walk_stats");

  struct Acc {
    MeanVar s, lmin, mmax, tau, pneg, epos, eneg;
  };
  auto parts = run_blocks<Acc>(opt.workers, [&](unsigned b) {
    Rng rng(derive_stream(opt.seed, tag, b, static_cast<std::uint64_t>(n)));
    Acc acc;
    for (std::uint64_t i = 0; i < blocks[b].count(); ++i) {
      double s = 0.0, lmin = 0.0;
      double mmax = -std::numeric_limits<double>::infinity();
      int tau = 0;
      for (int k = 1; k <= n; ++k) {
        s += sampler.states[sampler.sample_state(rng)].x;
        if (s < lmin) {
          lmin = s;
          tau = k;
        }
        if (s > mmax) mmax = s;
      }
      acc.s.add(s);
      acc.lmin.add(lmin);
      acc.mmax.add(mmax);
      acc.tau.add(static_cast<double>(tau));
      acc.pneg.add(mmax < 0.0 ? 1.0 : 0.0);
      acc.epos.add(mmax < 0.0 ? std::exp(opt.theta * s) : 0.0);
      acc.eneg.add(lmin >= 0.0 ? std::exp(-opt.theta * s) : 0.0);
    }
    return acc;
  });
  const Acc total =
      pairwise_reduce(std::move(parts), [](const Acc& a, const Acc& b) {
        return Acc{MeanVar::merge(a.s, b.s),       MeanVar::merge(a.lmin, b.lmin),
                   MeanVar::merge(a.mmax, b.mmax), MeanVar::merge(a.tau, b.tau),
                   MeanVar::merge(a.pneg, b.pneg), MeanVar::merge(a.epos, b.epos),
                   MeanVar::merge(a.eneg, b.eneg)};
      });
  WalkStats out;
  out.n = n;
  out.samples = opt.samples;
  out.theta = opt.theta;
  out.tilted = opt.tilted;
  out.mean_s = total.s.mean;
  out.mean_min = total.lmin.mean;
  out.mean_max = total.mmax.mean;
  out.mean_tau = total.tau.mean;
  out.prob_max_neg = total.pneg.mean;
  out.exp_pos = total.epos.mean;
  out.exp_pos_se = total.epos.std_error();
  out.exp_neg = total.eneg.mean;
  out.exp_neg_se = total.eneg.std_error();
  return out;
}

}  // namespace bpire
