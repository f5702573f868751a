#include "bpire/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "bpire/parallel.hpp"

namespace bpire {

const char* to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::Exact: return "exact";
    case KernelMethod::McDirect: return "mc-direct";
    case KernelMethod::McTilted: return "mc-tilted";
  }
  return "?";
}

void KernelSeries::validate() const {
  if (H.size() != Hstar.size())
    throw std::logic_error("KernelSeries: H/Hstar size mismatch");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::logic_error("KernelSeries: gamma outside (0,1)");
  double bound = tail_const;
  for (std::size_t n = 0; n < H.size(); ++n) {
    bound *= gamma;  // tail_const * gamma^{n+1}
    const double slack = 5.0 * H[n].se + 1e-12 * bound + 1e-300;
    if (H[n].value < -slack || H[n].value > 1.0 + 1e-12)
      throw std::logic_error("KernelSeries: H outside [0,1]");
    if (H[n].value > bound + slack)
      throw std::logic_error("KernelSeries: H exceeds tail bound at n=" +
                             std::to_string(n));
    const double oslack = 5.0 * (H[n].se + Hstar[n].se) + 1e-14;
    if (n >= 1 && Hstar[n].value < H[n].value - oslack)
      throw std::logic_error("KernelSeries: H* < H at n=" + std::to_string(n));
  }
}

namespace {

std::uint64_t ipow(std::uint64_t base, unsigned exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

// Depth-first sum over state sequences for a single horizon. Positions are
// visited from the back of the chain so the inner composition value u and
// the partial product of immigration pgfs extend by O(1) per node.
//
// `chain_len` is the number of environment steps; `g_positions` the number
// of trailing positions (towards the front) carrying a G factor. For H_n:
// chain_len = n+1, g_positions = n. For B_n(s): chain_len = n,
// g_positions = n, u starts at s.
template <typename Leaf>
void enumerate_sequences(const EnvModel& env, int chain_len, int g_positions,
                         double u0, Leaf&& leaf) {
  if (chain_len == 0) {
    leaf(1.0, 1.0, u0, 0.0);
    return;
  }
  struct Frame {
    double u, weight, gprod, sum_x;
  };
  const int K = static_cast<int>(env.size());
  std::vector<Frame> stack(static_cast<std::size_t>(chain_len) + 1);
  std::vector<int> choice(static_cast<std::size_t>(chain_len), -1);
  stack[0] = {u0, 1.0, 1.0, 0.0};
  int depth = 0;  // depth d chooses the state at position chain_len - d
  while (depth >= 0) {
    int& c = choice[static_cast<std::size_t>(depth)];
    ++c;
    if (c >= K) {
      c = -1;
      --depth;
      continue;
    }
    const Frame& f = stack[static_cast<std::size_t>(depth)];
    const EnvState& st = env.states[static_cast<std::size_t>(c)];
    const int position = chain_len - depth;  // counts down chain_len..1
    double gprod = f.gprod;
    if (position <= g_positions) gprod *= st.immigration.eval(f.u);
    Frame next{st.offspring.eval(f.u), f.weight * env.probs[static_cast<std::size_t>(c)],
               gprod, f.sum_x + st.x};
    if (depth + 1 == chain_len) {
      leaf(next.weight, next.gprod, next.u, next.sum_x);
    } else {
      stack[static_cast<std::size_t>(depth + 1)] = next;
      ++depth;
    }
  }
}

void check_budget(const EnvModel& env, int chain_len, std::uint64_t budget) {
  const std::uint64_t cost =
      ipow(env.size(), static_cast<unsigned>(chain_len), budget);
  if (cost > budget)
    throw std::invalid_argument(
        "kernel_exact: K^(n_max+1) exceeds the enumeration budget (" +
        std::to_string(budget) + " sequences); use kernel_mc");
}

double tilt_weight(const Regime& regime, int steps, double sum_x) {
  return std::pow(regime.gamma, steps) * std::exp(-regime.delta * sum_x);
}

}  // namespace

KernelSeries kernel_exact(const EnvModel& env, const Regime& regime, int n_max,
                          std::uint64_t budget) {
  if (n_max < 0) throw std::invalid_argument("kernel_exact: n_max < 0");
  check_budget(env, n_max + 1, budget);
  KernelSeries ks;
  ks.gamma = regime.gamma;
  ks.delta = regime.delta;
  ks.tail_const = mean_immigration(env);
  ks.tail_const_star = mean_immigration_normalized(env);
  ks.H.resize(static_cast<std::size_t>(n_max) + 1);
  ks.Hstar.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    double h = 0.0, hs = 0.0;
    enumerate_sequences(env, n + 1, n, 0.0,
                        [&](double w, double gprod, double u, double) {
                          const double wg = w * gprod;
                          h += wg * immigration_front(env, u);
                          hs += wg * immigration_front_normalized(env, u);
                        });
    ks.H[static_cast<std::size_t>(n)] = {h, 0.0, KernelMethod::Exact};
    ks.Hstar[static_cast<std::size_t>(n)] =
        n == 0 ? KernelEntry{0.0, 0.0, KernelMethod::Exact}
               : KernelEntry{hs, 0.0, KernelMethod::Exact};
  }
  ks.validate();
  return ks;
}

KernelSeries kernel_exact(const EnvModel& env, int n_max,
                          std::uint64_t budget) {
  return kernel_exact(env, classify(env), n_max, budget);
}

KernelMcResult kernel_mc(const EnvModel& env, const Regime& regime, int n,
                         KernelMethod mode, const McOptions& opt) {
  if (n < 0) throw std::invalid_argument("kernel_mc: n < 0");
  if (opt.samples < 100)
    throw std::invalid_argument("kernel_mc: need at least 100 samples");
  if (mode == KernelMethod::Exact)
    throw std::invalid_argument("kernel_mc: mode must be direct or tilted");
  const bool tilted = mode == KernelMethod::McTilted;
  const EnvModel sampler = tilted ? tilt(env, regime.delta) : env;
  const int steps = n + 1;
  const auto blocks = partition_blocks(opt.samples, opt.workers);
  const std::uint64_t tag = hash_tag("kernel_mc");

  struct Acc {
    MeanVar h, hs;
  };
  auto results = run_blocks<Acc>(opt.workers, [&](unsigned b) {
    Rng rng(derive_stream(opt.seed, tag, b,
                          static_cast<std::uint64_t>(n) * 2 + (tilted ? 1 : 0)));
    Acc acc;
    std::vector<int> seq(static_cast<std::size_t>(steps));
    for (std::uint64_t i = 0; i < blocks[b].count(); ++i) {
      double sum_x = 0.0;
      for (int j = 0; j < steps; ++j) {
        const int s = static_cast<int>(sampler.sample_state(rng));
        seq[static_cast<std::size_t>(j)] = s;
        sum_x += env.states[static_cast<std::size_t>(s)].x;
      }
      // backward pass: u_j and the product over positions j <= n
      double u = 0.0, gprod = 1.0;
      for (int j = steps - 1; j >= 0; --j) {
        const EnvState& st = env.states[static_cast<std::size_t>(
            seq[static_cast<std::size_t>(j)])];
        if (j + 1 <= n) gprod *= st.immigration.eval(u);
        u = st.offspring.eval(u);
      }
      const double w = tilted ? tilt_weight(regime, steps, sum_x) : 1.0;
      acc.h.add(w * gprod * immigration_front(env, u));
      acc.hs.add(w * gprod * immigration_front_normalized(env, u));
    }
    return acc;
  });
  const Acc total = pairwise_reduce(std::move(results), [](const Acc& a, const Acc& b) {
    return Acc{MeanVar::merge(a.h, b.h), MeanVar::merge(a.hs, b.hs)};
  });
  KernelMcResult out;
  out.h = {total.h.mean, total.h.std_error(), mode};
  out.hstar = {total.hs.mean, total.hs.std_error(), mode};
  return out;
}

KernelSeries kernel_mc_series(const EnvModel& env, const Regime& regime,
                              int n_max, KernelMethod mode,
                              const McOptions& opt) {
  KernelSeries ks;
  ks.gamma = regime.gamma;
  ks.delta = regime.delta;
  ks.tail_const = mean_immigration(env);
  ks.tail_const_star = mean_immigration_normalized(env);
  ks.H.resize(static_cast<std::size_t>(n_max) + 1);
  ks.Hstar.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const KernelMcResult r = kernel_mc(env, regime, n, mode, opt);
    ks.H[static_cast<std::size_t>(n)] = r.h;
    ks.Hstar[static_cast<std::size_t>(n)] =
        n == 0 ? KernelEntry{0.0, 0.0, mode} : r.hstar;
  }
  ks.validate();
  return ks;
}

double r1(const EnvModel& env) {
  double acc = 0.0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const PgfLaw& g = env.states[k].immigration;
    const double g0 = g.eval(0.0);
    if (g0 >= 1.0)
      throw std::domain_error(
          "r1: initial law undefined (a state has G(0) = 1)");
    for (std::size_t j = 0; j < env.size(); ++j) {
      const double f0 = env.states[j].offspring.eval(0.0);
      acc += env.probs[k] * env.probs[j] * (g.eval(f0) - g0) / (1.0 - g0);
    }
  }
  return 1.0 - acc;
}

namespace {

double b_front(const EnvModel& env, const BSpec& b, double u) {
  switch (b.kind) {
    case BSpec::Kind::G0:
      return immigration_front(env, u);
    case BSpec::Kind::G0Normalized:
      return immigration_front_normalized(env, u);
    case BSpec::Kind::Power:
      return 1.0 - std::pow(u, static_cast<double>(b.z));
  }
  return 0.0;
}

}  // namespace

BSeriesResult b_series_exact(const EnvModel& env, const Regime& regime,
                             double s, const BSpec& b, int n,
                             std::uint64_t budget) {
  if (n < 0) throw std::invalid_argument("b_series: n < 0");
  check_budget(env, n, budget);
  // Sequence weight under the tilted measure times e^{-delta S_n} collapses
  // to gamma^{-n} times the plain probability.
  double acc = 0.0;
  enumerate_sequences(env, n, n, s,
                      [&](double w, double gprod, double u, double) {
                        acc += w * gprod * b_front(env, b, u);
                      });
  return {acc * std::pow(regime.gamma, -n), 0.0};
}

BSeriesResult b_series_mc(const EnvModel& env, const Regime& regime, double s,
                          const BSpec& b, int n, const McOptions& opt) {
  if (n < 0) throw std::invalid_argument("b_series: n < 0");
  if (opt.samples < 100)
    throw std::invalid_argument("b_series_mc: need at least 100 samples");
  const EnvModel sampler = tilt(env, regime.delta);
  const auto blocks = partition_blocks(opt.samples, opt.workers);
  const std::uint64_t tag = hash_tag("b_series_mc");
  auto results = run_blocks<MeanVar>(opt.workers, [&](unsigned blk) {
    Rng rng(derive_stream(opt.seed, tag, blk, static_cast<std::uint64_t>(n)));
    MeanVar acc;
    std::vector<int> seq(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < blocks[blk].count(); ++i) {
      double sum_x = 0.0;
      for (int j = 0; j < n; ++j) {
        const int st = static_cast<int>(sampler.sample_state(rng));
        seq[static_cast<std::size_t>(j)] = st;
        sum_x += env.states[static_cast<std::size_t>(st)].x;
      }
      double u = s, gprod = 1.0;
      for (int j = n - 1; j >= 0; --j) {
        const EnvState& st = env.states[static_cast<std::size_t>(
            seq[static_cast<std::size_t>(j)])];
        gprod *= st.immigration.eval(u);
        u = st.offspring.eval(u);
      }
      acc.add(std::exp(-regime.delta * sum_x) * gprod * b_front(env, b, u));
    }
    return acc;
  });
  const MeanVar total = pairwise_reduce(std::move(results), MeanVar::merge);
  return {total.mean, total.std_error()};
}

}  // namespace bpire
