#include "bpire/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpire {

namespace {

constexpr double kClassifyTol = 1e-9;
constexpr double kProbSumTol = 1e-9;

}  // namespace

EnvState::EnvState(PgfLaw f, PgfLaw g)
    : offspring(std::move(f)), immigration(std::move(g)), x(0.0) {
  const double m = offspring.mean();
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::domain_error("EnvState: offspring mean must be in (0,inf)");
  x = std::log(m);
  if (!std::isfinite(x)) throw std::domain_error("EnvState: log-mean not finite");
  if (!std::isfinite(immigration.mean()))
    throw std::domain_error("EnvState: immigration mean not finite");
}

EnvModel::EnvModel(std::vector<EnvState> s, std::vector<double> p,
                   std::string lbl)
    : states(std::move(s)), probs(std::move(p)), label(std::move(lbl)) {
  if (states.empty()) throw std::invalid_argument("EnvModel: no states");
  if (states.size() != probs.size())
    throw std::invalid_argument("EnvModel: states/probs size mismatch");
  double sum = 0.0;
  for (double q : probs) {
    if (!(q > 0.0) || !std::isfinite(q))
      throw std::invalid_argument("EnvModel: probabilities must be positive");
    sum += q;
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    throw std::invalid_argument("EnvModel: probabilities sum to " +
                                std::to_string(sum));
  for (double& q : probs) q /= sum;
}

double EnvModel::mean_x() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) acc += probs[i] * states[i].x;
  return acc;
}

const char* to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::Strongly: return "strongly";
    case RegimeKind::Intermediate: return "intermediate";
    case RegimeKind::Weakly: return "weakly";
  }
  return "?";
}

std::pair<double, double> cumulant(const EnvModel& env, double t) {
  double g = 0.0, dg = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double w = env.probs[i] * std::exp(t * env.states[i].x);
    g += w;
    dg += env.states[i].x * w;
  }
  return {g, dg};
}

namespace {

// Locates the root of phi(t) = E[X e^{tX}] on (0,1). phi is strictly
// increasing here (phi(0) < 0 < phi(1)), so bisection brackets and Newton
// polishes to machine precision.
double weak_beta(const EnvModel& env) {
  double lo = 0.0, hi = 1.0;
  auto phi = [&](double t) { return cumulant(env, t).second; };
  if (!(phi(lo) < 0.0 && phi(hi) > 0.0))
    throw std::domain_error("classify: weak-case root not bracketed in (0,1)");
  double t = 0.5;
  for (int it = 0; it < 200; ++it) {
    const auto [g, dg] = cumulant(env, t);
    (void)g;
    if (dg > 0.0)
      hi = t;
    else if (dg < 0.0)
      lo = t;
    else
      return t;
    // derivative of phi: E[X^2 e^{tX}]
    double d2 = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i)
      d2 += env.probs[i] * env.states[i].x * env.states[i].x *
            std::exp(t * env.states[i].x);
    double next = t - dg / d2;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || hi - lo < 1e-16) return 0.5 * (lo + hi);
    t = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Regime classify(const EnvModel& env, long long theta_a) {
  const double mx = env.mean_x();
  if (!(mx < 0.0))
    throw std::domain_error("classify: not subcritical (E[X] >= 0)");
  const double phi1 = cumulant(env, 1.0).second;
  Regime r{RegimeKind::Strongly, std::nullopt, 1.0, 0.0, mx, {}};
  if (phi1 < -kClassifyTol) {
    r.kind = RegimeKind::Strongly;
    r.delta = 1.0;
  } else if (phi1 <= kClassifyTol) {
    r.kind = RegimeKind::Intermediate;
    r.delta = 1.0;
  } else {
    const double beta = weak_beta(env);
    if (!(beta > 0.0 && beta < 1.0))
      throw std::domain_error(
          "classify: weak-case root outside (0,1) (out-of-scope environment)");
    r.kind = RegimeKind::Weakly;
    r.beta = beta;
    r.delta = beta;
  }
  r.gamma = cumulant(env, r.delta).first;
  r.flags = hypothesis_report(env, theta_a);
  return r;
}

EnvModel tilt(const EnvModel& env, double delta) {
  if (!std::isfinite(delta) || delta == 0.0)
    throw std::domain_error("tilt: delta must be finite and nonzero");
  const double gamma = cumulant(env, delta).first;
  std::vector<double> p(env.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    p[i] = env.probs[i] * std::exp(delta * env.states[i].x) / gamma;
    sum += p[i];
  }
  for (double& q : p) q /= sum;
  return EnvModel(env.states, std::move(p),
                  env.label.empty() ? "" : env.label + "-tilted");
}

namespace {

// Lattice heuristic: a span d > 1e-9 such that every x_i / d is within
// 1e-9 of an integer, searched by a real-valued gcd (nearest-integer
// Euclid) over the nonzero increments, with the implied integer multiples
// capped at 1e6.
struct LatticeScan {
  bool lattice = false;
  double span = 0.0;
};

LatticeScan detect_lattice(const std::vector<double>& xs) {
  std::vector<double> nz;
  for (double x : xs)
    if (std::abs(x) > 1e-12) nz.push_back(std::abs(x));
  if (nz.empty()) return {true, 0.0};  // X identically 0
  double d = nz[0];
  for (std::size_t i = 1; i < nz.size(); ++i) {
    double a = std::max(d, nz[i]);
    double b = std::min(d, nz[i]);
    for (int it = 0; it < 64 && b > 1e-12; ++it) {
      const double r = std::abs(a - std::round(a / b) * b);
      a = b;
      b = r;
    }
    d = a;
    if (d < 1e-9) return {false, 0.0};
  }
  if (d < 1e-9) return {false, 0.0};
  for (double x : xs) {
    const double ratio = x / d;
    if (std::abs(ratio) > 1e6) return {false, 0.0};
    if (std::abs(ratio - std::round(ratio)) > 1e-9) return {false, 0.0};
  }
  return {true, d};
}

double log_plus(double v) { return std::log(std::max(1.0, v)); }

}  // namespace

HypothesisReport hypothesis_report(const EnvModel& env, long long a) {
  if (a < 1) throw std::domain_error("hypothesis_report: a must be >= 1");
  HypothesisReport rep;
  rep.a = a;

  std::vector<double> xs;
  xs.reserve(env.size());
  for (const auto& st : env.states) xs.push_back(st.x);
  const LatticeScan scan = detect_lattice(xs);
  rep.lattice = scan.lattice;
  rep.span = scan.span;
  rep.a2_status = scan.lattice ? "FLAG" : "PASS";

  // A3/A4 are expectations over the environment law; use the tilted
  // probabilities when the model classifies (they are exact mixtures).
  std::vector<double> w = env.probs;
  rep.tilted_measure = false;
  try {
    const double mx = env.mean_x();
    if (mx < 0.0) {
      const double phi1 = cumulant(env, 1.0).second;
      double delta = 1.0;
      if (phi1 > kClassifyTol) delta = weak_beta(env);
      const double gamma = cumulant(env, delta).first;
      double sum = 0.0;
      for (std::size_t i = 0; i < env.size(); ++i) {
        w[i] = env.probs[i] * std::exp(delta * env.states[i].x) / gamma;
        sum += w[i];
      }
      for (double& q : w) q /= sum;
      rep.tilted_measure = true;
    }
  } catch (const std::exception&) {
    w = env.probs;
    rep.tilted_measure = false;
  }

  constexpr double kEps = 0.1;
  bool theta_ok = true;
  double a3 = 0.0, a3p = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    double th;
    try {
      th = env.states[i].offspring.theta(a);
    } catch (const std::exception&) {
      theta_ok = false;
      break;
    }
    if (!std::isfinite(th)) {
      theta_ok = false;
      break;
    }
    const double lt = log_plus(th);
    a3 += w[i] * lt;
    a3p += w[i] * std::pow(lt, 2.0 + kEps);
  }
  rep.a3_log_theta = a3;
  rep.a3_log_theta_pow = a3p;
  rep.a3_status = theta_ok ? "PASS" : "FAIL";

  bool a4_ok = true;
  double a4 = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double g0 = env.states[i].immigration.eval(0.0);
    if (g0 >= 1.0) {
      a4_ok = false;
      break;
    }
    a4 += w[i] * env.states[i].immigration.mean() / (1.0 - g0);
  }
  rep.a4_value = a4_ok ? a4 : std::numeric_limits<double>::infinity();
  rep.a4_status = a4_ok ? "PASS" : "FAIL";
  return rep;
}

double immigration_front(const EnvModel& env, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i)
    acc += env.probs[i] * (1.0 - env.states[i].immigration.eval(u));
  return acc;
}

double immigration_front_normalized(const EnvModel& env, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double g0 = env.states[i].immigration.eval(0.0);
    const double num = 1.0 - env.states[i].immigration.eval(u);
    if (num == 0.0) continue;  // G == 1 pointwise: empty immigration state
    if (g0 >= 1.0)
      throw std::domain_error(
          "normalized immigration front: state with G(0) = 1");
    acc += env.probs[i] * num / (1.0 - g0);
  }
  return acc;
}

double mean_immigration(const EnvModel& env) {
  double acc = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i)
    acc += env.probs[i] * env.states[i].immigration.mean();
  return acc;
}

double mean_immigration_normalized(const EnvModel& env) {
  double acc = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double g0 = env.states[i].immigration.eval(0.0);
    if (g0 >= 1.0) continue;  // point mass at 0: the normalized front is 0
    acc += env.probs[i] * env.states[i].immigration.mean() / (1.0 - g0);
  }
  return acc;
}

}  // namespace bpire
