#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpire/env.hpp"

namespace bpire {

enum class KernelMethod { Exact, McDirect, McTilted };

const char* to_string(KernelMethod m);

struct KernelEntry {
  double value = 0.0;
  double se = 0.0;  // 0 for exact entries
  KernelMethod method = KernelMethod::Exact;
};

// The sequences H_n and H*_n driving the life-period renewal identity,
// with the data needed for certified series evaluation:
//   H_n <= tail_const * gamma^{n+1},  H*_n <= tail_const_star * gamma^{n+1}.
// Hstar[0] is identically zero (the H* series starts at n = 1).
struct KernelSeries {
  std::vector<KernelEntry> H;      // n = 0..N
  std::vector<KernelEntry> Hstar;  // n = 0..N, [0] == 0
  double gamma = 0.0;
  double delta = 1.0;
  double tail_const = 0.0;       // E[G'(1)]
  double tail_const_star = 0.0;  // E[G'(1)/(1-G(0))]

  int max_n() const { return static_cast<int>(H.size()) - 1; }
  void validate() const;
};

struct McOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 4;
};

// Exact kernel values for n = 0..n_max by depth-first enumeration of all
// K^{n+1} environment sequences (suffix values and partial products are
// shared along the tree). The expectation over the initial immigration law
// is factored analytically. Refuses when K^{n_max+1} exceeds the budget.
KernelSeries kernel_exact(const EnvModel& env, const Regime& regime, int n_max,
                          std::uint64_t budget = 20000000);
KernelSeries kernel_exact(const EnvModel& env, int n_max,
                          std::uint64_t budget = 20000000);

struct KernelMcResult {
  KernelEntry h;
  KernelEntry hstar;
};

// Unbiased Monte Carlo estimate of (H_n, H*_n). Direct mode samples the
// environment as given; tilted mode samples states reweighted by
// e^{delta x}/gamma and multiplies by gamma^{n+1} e^{-delta S_{n+1}}.
KernelMcResult kernel_mc(const EnvModel& env, const Regime& regime, int n,
                         KernelMethod mode, const McOptions& opt);

// Full series with every entry estimated by kernel_mc.
KernelSeries kernel_mc_series(const EnvModel& env, const Regime& regime,
                              int n_max, KernelMethod mode,
                              const McOptions& opt);

// R_1 = P(zeta > 1) = 1 - E[(G_0(F_1(0)) - G_0(0)) / (1 - G_0(0))],
// an exact sum over (G_0 state, F_1 state) pairs. Requires G(0) < 1 in
// every state.
double r1(const EnvModel& env);

// Initial generating function used by the general functional below.
struct BSpec {
  enum class Kind { G0, G0Normalized, Power } kind = Kind::G0;
  long long z = 1;  // exponent for Kind::Power

  static BSpec g0() { return {Kind::G0, 0}; }
  static BSpec g0_normalized() { return {Kind::G0Normalized, 0}; }
  static BSpec power(long long z) { return {Kind::Power, z}; }
};

struct BSeriesResult {
  double value = 0.0;
  double se = 0.0;
};

// B_n(s) = E~[(1 - B(F_{0,n}(s))) prod_{i=1..n} G_i(F_{i,n}(s)) e^{-delta S_n}]
// under the tilted measure (the e^{-delta S_n} factor is part of the value;
// no gamma power is applied).
BSeriesResult b_series_exact(const EnvModel& env, const Regime& regime,
                             double s, const BSpec& b, int n,
                             std::uint64_t budget = 20000000);
BSeriesResult b_series_mc(const EnvModel& env, const Regime& regime, double s,
                          const BSpec& b, int n, const McOptions& opt);

}  // namespace bpire
