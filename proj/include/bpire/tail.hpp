#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bpire/kernel.hpp"

namespace bpire {

enum class Provenance { Recurrence, Empirical, ClosedForm };

const char* to_string(Provenance p);

struct SurvivalPoint {
  int n = 0;
  double value = 0.0;
  double half_width = 0.0;  // 3-sigma confidence half-width
  Provenance provenance = Provenance::Recurrence;
};

struct SurvivalCurve {
  std::vector<SurvivalPoint> points;  // n = 1..N in order

  const SurvivalPoint& at(int n) const;
  int max_n() const {
    return points.empty() ? 0 : points.back().n;
  }
};

// R_n = H*_{n-1} + sum_{m=1}^{n-1} H_{n-1-m} R_m for n >= 2, R_1 given.
// Kernel standard errors are propagated to first order through the linear
// recurrence; half-widths are 3 sigma.
SurvivalCurve survival_from_kernel(const KernelSeries& ks, double r1_value,
                                   int count);

enum class RootCase { Case1, Case2, Case3Boundary };

const char* to_string(RootCase c);

// Certificate for the decay equation x H(x) = 1 on (1, 1/gamma). Interval
// enclosures combine the truncated series (3-sigma widened for MC entries)
// with the geometric remainder tail_const*gamma*(gamma x)^{N+1}/(1-gamma x).
struct RootCertificate {
  RootCase kind = RootCase::Case1;
  double r = 0.0;            // bracket midpoint (Case1)
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool width_target_met = false;  // bracket narrowed to 1e-9 relative
  double t_residual_bound = 0.0;  // certified bound on |r H(r) - 1| at r
  double t1_estimate = 0.0;  // truncated value of gamma^{-1} H(gamma^{-1})
  double t1_lower = 0.0;     // certified lower bound of the same
  bool t1_upper_finite = false;
  double t1_upper = 0.0;
};

// No certified sign decision was possible; required_n estimates the kernel
// horizon at which the truncation remainder would stop blocking.
class UndecidedRootError : public std::runtime_error {
 public:
  UndecidedRootError(const std::string& what, long long required_n)
      : std::runtime_error(what), required_n(required_n) {}
  long long required_n;
};

RootCertificate find_root(const KernelSeries& ks,
                          double target_rel_width = 1e-9);

// Case-1 prefactor (r H*(r) + r R_1) / (H(r) + r H'(r)), with both series
// evaluated under the same certified truncation bounds. Throws if the
// denominator enclosure contains zero.
double case1_constant(const KernelSeries& ks, double r1_value, double r);

enum class FitModel { PureExponential, ExponentialTimesPower };

const char* to_string(FitModel m);

struct FitResult {
  FitModel model = FitModel::PureExponential;
  double rate = 0.0;       // e^{slope}, or gamma for the power model
  double power = 0.0;      // 0 for the pure exponential
  double prefactor = 0.0;
  int n_lo = 0;
  int n_hi = 0;
  double residual_rms = 0.0;
};

// Unweighted least squares on the stated window (defaults to the middle
// third [N/3, 2N/3]): log R_n on n for the pure exponential, and
// log(R_n gamma^{-n}) on log n for the exponential-times-power model.
FitResult decay_fit(const SurvivalCurve& curve, FitModel model,
                    std::optional<std::pair<int, int>> window = std::nullopt,
                    std::optional<double> gamma = std::nullopt);

}  // namespace bpire
