#include "bpire/harmonic.hpp"

#include <cmath>
#include <stdexcept>

#include "bpire/parallel.hpp"

namespace bpire {

namespace {

void require_oscillating(const EnvModel& env) {
  if (std::abs(env.mean_x()) > 1e-10)
    throw std::domain_error(
        "renewal estimate: walk must be mean-zero (tilt the model first)");
}

struct LadderAcc {
  MeanVar count;
  std::uint64_t cap_hits = 0;

  static LadderAcc merge(const LadderAcc& a, const LadderAcc& b) {
    return {MeanVar::merge(a.count, b.count), a.cap_hits + b.cap_hits};
  }
};

RenewalEstimate finish(double x, const LadderAcc& acc, long long step_cap,
                       std::uint64_t paths) {
  RenewalEstimate est;
  est.x = x;
  est.value = 1.0 + acc.count.mean;
  est.se = acc.count.std_error();
  est.step_cap = step_cap;
  est.cap_hit_fraction =
      static_cast<double>(acc.cap_hits) / static_cast<double>(paths);
  est.paths = paths;
  return est;
}

}  // namespace

RenewalEstimate renewal_U(const EnvModel& env_tilted, double x,
                          const RenewalOptions& opt) {
  if (x < 0.0) throw std::domain_error("renewal_U: x must be >= 0");
  require_oscillating(env_tilted);
  if (x == 0.0) {
    // S_n >= 0 and M_n < 0 are contradictory: U(0) = 1 with no estimation
    return {0.0, 1.0, 0.0, opt.step_cap, 0.0, 0};
  }
  const auto blocks = partition_blocks(opt.samples, opt.workers);
  const std::uint64_t tag = hash_tag("renewal_U");
  auto parts = run_blocks<LadderAcc>(opt.workers, [&](unsigned b) {
    LadderAcc acc;
    for (std::uint64_t i = 0; i < blocks[b].count(); ++i) {
      Rng rng(derive_stream(opt.seed, tag, b, i));
      double s = 0.0, strict_min = 0.0;
      double count = 0.0;
      bool finished = false;
      for (long long step = 0; step < opt.step_cap; ++step) {
        s += env_tilted.states[env_tilted.sample_state(rng)].x;
        if (s < strict_min) {  // strict descending ladder epoch
          strict_min = s;
          if (s >= -x) {
            count += 1.0;
          } else {
            finished = true;
            break;
          }
        }
      }
      if (!finished) ++acc.cap_hits;
      acc.count.add(count);
    }
    return acc;
  });
  return finish(x, pairwise_reduce(std::move(parts), LadderAcc::merge),
                opt.step_cap, opt.samples);
}

RenewalEstimate renewal_V(const EnvModel& env_tilted, double x,
                          const RenewalOptions& opt) {
  if (x > 0.0) throw std::domain_error("renewal_V: x must be <= 0");
  require_oscillating(env_tilted);
  if (x == 0.0) {
    return {0.0, 1.0, 0.0, opt.step_cap, 0.0, 0};
  }
  const auto blocks = partition_blocks(opt.samples, opt.workers);
  const std::uint64_t tag = hash_tag("renewal_V");
  auto parts = run_blocks<LadderAcc>(opt.workers, [&](unsigned b) {
    LadderAcc acc;
    for (std::uint64_t i = 0; i < blocks[b].count(); ++i) {
      Rng rng(derive_stream(opt.seed, tag, b, i));
      double s = 0.0, weak_max = 0.0;
      double count = 0.0;
      bool finished = false;
      for (long long step = 0; step < opt.step_cap; ++step) {
        s += env_tilted.states[env_tilted.sample_state(rng)].x;
        if (s >= weak_max) {  // weak ascending ladder epoch
          weak_max = s;
          if (s < -x) {
            count += 1.0;
          } else {
            finished = true;
            break;
          }
        }
      }
      if (!finished) ++acc.cap_hits;
      acc.count.add(count);
    }
    return acc;
  });
  return finish(x, pairwise_reduce(std::move(parts), LadderAcc::merge),
                opt.step_cap, opt.samples);
}

RenewalEstimate renewal_U_series(const EnvModel& env_tilted, double x,
                                 long long horizon, std::uint64_t samples,
                                 std::uint64_t seed, unsigned workers) {
  if (x < 0.0) throw std::domain_error("renewal_U_series: x must be >= 0");
  require_oscillating(env_tilted);
  if (x == 0.0) return {0.0, 1.0, 0.0, horizon, 0.0, 0};
  const auto blocks = partition_blocks(samples, workers);
  const std::uint64_t tag = hash_tag("renewal_U_series");
  auto parts = run_blocks<LadderAcc>(workers, [&](unsigned b) {
    LadderAcc acc;
    for (std::uint64_t i = 0; i < blocks[b].count(); ++i) {
      Rng rng(derive_stream(seed, tag, b, i));
      // counts times n <= horizon with S_n in [-x, 0) while M_n < 0;
      // the path stops once the running maximum reaches 0
      double s = 0.0;
      double count = 0.0;
      for (long long step = 0; step < horizon; ++step) {
        s += env_tilted.states[env_tilted.sample_state(rng)].x;
        if (s >= 0.0) break;
        if (s >= -x) count += 1.0;
      }
      acc.count.add(count);
    }
    return acc;
  });
  return finish(x, pairwise_reduce(std::move(parts), LadderAcc::merge), horizon,
                samples);
}

HarmonicResidual harmonic_check(RenewalKind which, const EnvModel& env_tilted,
                                double x, const RenewalOptions& opt) {
  require_oscillating(env_tilted);
  HarmonicResidual out;
  out.which = which;
  out.x = x;

  RenewalOptions sub = opt;
  double lhs = 0.0, var = 0.0;
  for (std::size_t i = 0; i < env_tilted.size(); ++i) {
    const double y = x + env_tilted.states[i].x;
    const double p = env_tilted.probs[i];
    if (which == RenewalKind::U) {
      if (y < 0.0) continue;
      sub.seed = derive_stream(opt.seed, hash_tag("harmonic_mix"), i, 1);
      const RenewalEstimate e = renewal_U(env_tilted, y, sub);
      lhs += p * e.value;
      var += p * p * e.se * e.se;
    } else {
      if (y >= 0.0) continue;
      sub.seed = derive_stream(opt.seed, hash_tag("harmonic_mix"), i, 2);
      const RenewalEstimate e = renewal_V(env_tilted, y, sub);
      lhs += p * e.value;
      var += p * p * e.se * e.se;
    }
  }
  sub.seed = derive_stream(opt.seed, hash_tag("harmonic_base"), 0, 0);
  const RenewalEstimate base = which == RenewalKind::U
                                   ? renewal_U(env_tilted, x, sub)
                                   : renewal_V(env_tilted, x, sub);
  out.lhs = lhs;
  out.rhs = base.value;
  out.residual = lhs - base.value;
  out.se = std::sqrt(var + base.se * base.se);
  return out;
}

}  // namespace bpire
