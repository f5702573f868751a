#include "bpire/tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bpire {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Recurrence: return "recurrence";
    case Provenance::Empirical: return "empirical";
    case Provenance::ClosedForm: return "closed-form";
  }
  return "?";
}

const char* to_string(RootCase c) {
  switch (c) {
    case RootCase::Case1: return "case1";
    case RootCase::Case2: return "case2";
    case RootCase::Case3Boundary: return "case3-boundary";
  }
  return "?";
}

const char* to_string(FitModel m) {
  switch (m) {
    case FitModel::PureExponential: return "pure-exponential";
    case FitModel::ExponentialTimesPower: return "exponential-times-power";
  }
  return "?";
}

const SurvivalPoint& SurvivalCurve::at(int n) const {
  for (const auto& p : points)
    if (p.n == n) return p;
  throw std::out_of_range("SurvivalCurve: no entry for n=" + std::to_string(n));
}

SurvivalCurve survival_from_kernel(const KernelSeries& ks, double r1_value,
                                   int count) {
  if (count < 1) throw std::invalid_argument("survival_from_kernel: N < 1");
  if (ks.max_n() < count - 1)
    throw std::invalid_argument(
        "survival_from_kernel: kernel entries up to n=" +
        std::to_string(count - 1) + " required, have " +
        std::to_string(ks.max_n()));
  if (!(r1_value >= 0.0 && r1_value <= 1.0))
    throw std::invalid_argument("survival_from_kernel: R1 outside [0,1]");

  std::vector<double> r(static_cast<std::size_t>(count) + 1, 0.0);
  std::vector<double> var(static_cast<std::size_t>(count) + 1, 0.0);
  r[1] = r1_value;
  for (int n = 2; n <= count; ++n) {
    const auto& hs = ks.Hstar[static_cast<std::size_t>(n - 1)];
    double v = hs.value;
    double w = hs.se * hs.se;
    for (int m = 1; m <= n - 1; ++m) {
      const auto& h = ks.H[static_cast<std::size_t>(n - 1 - m)];
      v += h.value * r[static_cast<std::size_t>(m)];
      w += r[static_cast<std::size_t>(m)] * r[static_cast<std::size_t>(m)] *
               h.se * h.se +
           h.value * h.value * var[static_cast<std::size_t>(m)];
    }
    r[static_cast<std::size_t>(n)] = v;
    var[static_cast<std::size_t>(n)] = w;
  }

  SurvivalCurve curve;
  curve.points.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n)
    curve.points.push_back({n, r[static_cast<std::size_t>(n)],
                            3.0 * std::sqrt(var[static_cast<std::size_t>(n)]),
                            Provenance::Recurrence});
  return curve;
}

namespace {

struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;
};

// Enclosure of T(x) = x H(x): truncated sums widened by 3 sigma plus the
// geometric remainder; entries are clamped to the theoretical tail bound.
Enclosure enclose_T(const KernelSeries& ks, double x) {
  double lo = 0.0, hi = 0.0;
  double xn = 1.0;                 // x^n
  double bound = ks.tail_const * ks.gamma;  // tail_const * gamma^{n+1}
  for (std::size_t n = 0; n < ks.H.size(); ++n) {
    const auto& e = ks.H[n];
    lo += std::max(0.0, e.value - 3.0 * e.se) * xn;
    hi += std::min(e.value + 3.0 * e.se, std::max(e.value, bound)) * xn;
    xn *= x;
    bound *= ks.gamma;
  }
  const double gx = ks.gamma * x;
  double rem;
  if (gx < 1.0) {
    // sum_{n>N} tail_const*gamma^{n+1} x^n = tail_const*gamma*(gx)^{N+1}/(1-gx)
    rem = ks.tail_const * ks.gamma * std::pow(gx, static_cast<double>(ks.H.size())) /
          (1.0 - gx);
  } else {
    rem = std::numeric_limits<double>::infinity();
  }
  return {x * lo, x * (hi + rem)};
}

long long required_terms(const KernelSeries& ks, double x, double gap) {
  const double gx = ks.gamma * x;
  if (!(gx < 1.0) || gap <= 0.0 || ks.tail_const <= 0.0)
    return std::numeric_limits<long long>::max() / 2;
  const double n = std::log(gap * (1.0 - gx) / (ks.tail_const * ks.gamma * x)) /
                   std::log(gx);
  if (!std::isfinite(n)) return std::numeric_limits<long long>::max() / 2;
  return std::max<long long>(ks.max_n() + 1, static_cast<long long>(std::ceil(n)));
}

[[noreturn]] void throw_undecided(const KernelSeries& ks, double x,
                                  const Enclosure& t) {
  const double gap = std::max(std::abs(1.0 - t.lo), 1e-12);
  const long long need = required_terms(ks, x, gap);
  double se_mass = 0.0;
  double xn = 1.0;
  for (const auto& e : ks.H) {
    se_mass += 3.0 * e.se * xn;
    xn *= x;
  }
  std::ostringstream os;
  os << "find_root: enclosure of T(" << x << ") = [" << t.lo << ", " << t.hi
     << "] straddles 1 and cannot be narrowed (kernel N=" << ks.max_n();
  if (se_mass * x > 0.25 * (t.hi - t.lo) && se_mass > 0)
    os << ", Monte Carlo standard errors dominate";
  os << "); approximately N=" << need << " kernel terms would be required";
  throw UndecidedRootError(os.str(), need);
}

}  // namespace

RootCertificate find_root(const KernelSeries& ks, double target_rel_width) {
  ks.validate();
  const double inv_gamma = 1.0 / ks.gamma;
  const double probe = inv_gamma * (1.0 - 1e-6);

  RootCertificate cert;
  {
    // T1 diagnostics at the series radius 1/gamma
    double est = 0.0, lo = 0.0, xn = 1.0;
    for (const auto& e : ks.H) {
      est += e.value * xn;
      lo += std::max(0.0, e.value - 3.0 * e.se) * xn;
      xn *= inv_gamma;
    }
    cert.t1_estimate = inv_gamma * est;
    cert.t1_lower = inv_gamma * lo;
    cert.t1_upper_finite = ks.tail_const == 0.0;
    cert.t1_upper = cert.t1_upper_finite
                        ? cert.t1_estimate
                        : std::numeric_limits<double>::infinity();
  }

  const Enclosure at_one = enclose_T(ks, 1.0);
  if (at_one.lo > 1.0)
    throw std::domain_error(
        "find_root: T(1) certified > 1; the kernel is not a life-period "
        "kernel (survival series would diverge)");
  if (!(at_one.hi < 1.0)) throw_undecided(ks, 1.0, at_one);

  const Enclosure at_probe = enclose_T(ks, probe);
  if (!(at_probe.lo > 1.0)) {
    // no certified sign change below the probe
    if (at_probe.hi < 1.0) {
      cert.kind = cert.t1_lower >= 1.0 - 1e-4 ? RootCase::Case3Boundary
                                              : RootCase::Case2;
      cert.bracket_lo = cert.bracket_hi = probe;
      cert.r = std::numeric_limits<double>::quiet_NaN();
      return cert;
    }
    throw_undecided(ks, probe, at_probe);
  }

  double lo = 1.0, hi = probe;
  bool target_met = false;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= target_rel_width * mid) {
      target_met = true;
      break;
    }
    const Enclosure t = enclose_T(ks, mid);
    if (t.hi < 1.0)
      lo = mid;
    else if (t.lo > 1.0)
      hi = mid;
    else
      break;  // enclosure floor reached; bracket stays certified
  }
  cert.kind = RootCase::Case1;
  cert.bracket_lo = lo;
  cert.bracket_hi = hi;
  cert.r = 0.5 * (lo + hi);
  cert.width_target_met = target_met;
  const Enclosure at_r = enclose_T(ks, cert.r);
  cert.t_residual_bound =
      std::max(std::abs(at_r.lo - 1.0), std::abs(at_r.hi - 1.0));
  return cert;
}

double case1_constant(const KernelSeries& ks, double r1_value, double r) {
  ks.validate();
  const double gx = ks.gamma * r;
  if (!(r > 1.0) || !(gx < 1.0))
    throw std::domain_error("case1_constant: r outside (1, 1/gamma)");

  double h_lo = 0.0, h_hi = 0.0;      // H(r)
  double hp_lo = 0.0, hp_hi = 0.0;    // H'(r)
  double hs_lo = 0.0, hs_hi = 0.0;    // H*(r)
  double xn = 1.0;                    // r^n
  for (std::size_t n = 0; n < ks.H.size(); ++n) {
    const auto& h = ks.H[n];
    const auto& hs = ks.Hstar[n];
    const double dn = static_cast<double>(n);
    h_lo += std::max(0.0, h.value - 3.0 * h.se) * xn;
    h_hi += (h.value + 3.0 * h.se) * xn;
    if (n >= 1) {
      hp_lo += dn * std::max(0.0, h.value - 3.0 * h.se) * xn / r;
      hp_hi += dn * (h.value + 3.0 * h.se) * xn / r;
      hs_lo += std::max(0.0, hs.value - 3.0 * hs.se) * xn;
      hs_hi += (hs.value + 3.0 * hs.se) * xn;
    }
    xn *= r;
  }
  const double N1 = static_cast<double>(ks.H.size());
  const double gxN = std::pow(gx, N1);
  const double om = 1.0 - gx;
  // remainders: sum_{n>N} C gamma^{n+1} r^n and its term-by-term derivative,
  // using sum_{n>N} n y^n = y^{N+1} ((N+1)(1-y) + y) / (1-y)^2
  const double rem_h = ks.tail_const * ks.gamma * gxN / om;
  const double rem_hs = ks.tail_const_star * ks.gamma * gxN / om;
  const double rem_hp =
      ks.tail_const * ks.gamma / r * gxN * (N1 * om + gx) / (om * om);
  h_hi += rem_h;
  hs_hi += rem_hs;
  hp_hi += rem_hp;

  const double num_lo = r * hs_lo + r * r1_value;
  const double num_hi = r * hs_hi + r * r1_value;
  const double den_lo = h_lo + r * hp_lo;
  const double den_hi = h_hi + r * hp_hi;
  if (!(den_lo > 0.0))
    throw std::domain_error(
        "case1_constant: denominator enclosure touches zero");
  const double c_lo = num_lo / den_hi;
  const double c_hi = num_hi / den_lo;
  return 0.5 * (c_lo + c_hi);
}

FitResult decay_fit(const SurvivalCurve& curve, FitModel model,
                    std::optional<std::pair<int, int>> window,
                    std::optional<double> gamma) {
  if (curve.points.empty()) throw std::invalid_argument("decay_fit: empty curve");
  int n_lo, n_hi;
  if (window) {
    n_lo = window->first;
    n_hi = window->second;
  } else {
    const int N = curve.max_n();
    n_lo = std::max(curve.points.front().n, N / 3);
    n_hi = std::max(n_lo + 1, 2 * N / 3);
  }
  if (n_lo >= n_hi)
    throw std::invalid_argument("decay_fit: empty window");
  if (model == FitModel::ExponentialTimesPower && !gamma)
    throw std::invalid_argument("decay_fit: power model requires gamma");

  std::vector<double> ts, ys;
  for (const auto& p : curve.points) {
    if (p.n < n_lo || p.n > n_hi) continue;
    if (!(p.value > 0.0))
      throw std::domain_error("decay_fit: nonpositive value at n=" +
                              std::to_string(p.n));
    if (model == FitModel::PureExponential) {
      ts.push_back(static_cast<double>(p.n));
      ys.push_back(std::log(p.value));
    } else {
      ts.push_back(std::log(static_cast<double>(p.n)));
      ys.push_back(std::log(p.value) -
                   static_cast<double>(p.n) * std::log(*gamma));
    }
  }
  if (ts.size() < 2)
    throw std::invalid_argument("decay_fit: window covers fewer than 2 points");

  const double n = static_cast<double>(ts.size());
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tbar += ts[i];
    ybar += ys[i];
  }
  tbar /= n;
  ybar /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tbar) * (ts[i] - tbar);
    sty += (ts[i] - tbar) * (ys[i] - ybar);
  }
  const double slope = sty / stt;
  const double intercept = ybar - slope * tbar;
  double rss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = ys[i] - (intercept + slope * ts[i]);
    rss += e * e;
  }

  FitResult fit;
  fit.model = model;
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  fit.residual_rms = std::sqrt(rss / n);
  fit.prefactor = std::exp(intercept);
  if (model == FitModel::PureExponential) {
    fit.rate = std::exp(slope);
    fit.power = 0.0;
    if (!(fit.rate > 0.0 && fit.rate < 1.0))
      throw std::domain_error("decay_fit: fitted rate " +
                              std::to_string(fit.rate) + " outside (0,1)");
  } else {
    fit.rate = *gamma;
    fit.power = slope;
  }
  return fit;
}

}  // namespace bpire
