#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bpire/laws.hpp"

namespace bpire {

// One environment state: an offspring law F, an immigration law G, and the
// walk increment x = log m(F).
struct EnvState {
  PgfLaw offspring;
  PgfLaw immigration;
  double x;

  EnvState(PgfLaw f, PgfLaw g);
};

// Finite-support i.i.d. environment: states with positive probabilities
// summing to one.
struct EnvModel {
  std::vector<EnvState> states;
  std::vector<double> probs;
  std::string label;

  EnvModel(std::vector<EnvState> s, std::vector<double> p,
           std::string label = "");

  std::size_t size() const { return states.size(); }

  double mean_x() const;

  std::size_t sample_state(Rng& rng) const { return sample_table(probs, rng); }
};

enum class RegimeKind { Strongly, Intermediate, Weakly };

const char* to_string(RegimeKind k);

// A2-A4 numeric report. A2 flags lattice walks instead of rejecting them;
// A3/A4 are finite sums here, so the statuses record definedness.
struct HypothesisReport {
  bool lattice = false;
  double span = 0.0;           // meaningful when lattice
  std::string a2_status;       // PASS | FLAG
  long long a = 1;             // truncation argument of theta
  double a3_log_theta = 0.0;   // E[(log+ theta(a))]
  double a3_log_theta_pow = 0.0;  // E[(log+ theta(a))^(2+eps)], eps = 0.1
  std::string a3_status;       // PASS | FAIL
  double a4_value = 0.0;       // E[G'(1)/(1-G(0))]
  std::string a4_status;       // PASS | FAIL
  bool tilted_measure = false; // expectations taken under the tilted law
};

// Subcriticality classification (Hypothesis A1) together with the tilting
// parameters delta and gamma = E[e^{delta X}].
struct Regime {
  RegimeKind kind;
  std::optional<double> beta;  // present iff weakly subcritical
  double delta;                // 1, or beta in the weak case
  double gamma;
  double mean_x;
  HypothesisReport flags;
};

// (E[e^{tX}], E[X e^{tX}]) as exact finite sums.
std::pair<double, double> cumulant(const EnvModel& env, double t);

// Classifies per Hypothesis A1. Requires E[X] < 0. The weak-case root of
// E[X e^{beta X}] = 0 is located by bisection + Newton to machine precision.
Regime classify(const EnvModel& env, long long theta_a = 1);

// Reweights state probabilities to p_i e^{delta x_i} / gamma. Any finite
// nonzero delta is accepted (negative deltas undo a tilt).
EnvModel tilt(const EnvModel& env, double delta);

HypothesisReport hypothesis_report(const EnvModel& env, long long a);

// Mixture over states of E_G[1 - G(u)] and its A4-normalized version
// (1 - G(u)) / (1 - G(0)); shared by the kernel expectations.
double immigration_front(const EnvModel& env, double u);
double immigration_front_normalized(const EnvModel& env, double u);

// C_G = E[G'(1)] and E[G'(1)/(1-G(0))]; the latter throws if some state
// has G(0) = 1.
double mean_immigration(const EnvModel& env);
double mean_immigration_normalized(const EnvModel& env);

}  // namespace bpire
