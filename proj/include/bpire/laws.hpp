#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bpire/rng.hpp"

namespace bpire {

// Composition-closed representation of a linear-fractional pgf through
//   1 - F(s) = m (1-s) / (1 + b (1-s)).
// Identity element is (m=1, b=0); composing valid laws keeps m <= 1+b.
struct LfRep {
  double m = 1.0;
  double b = 0.0;

  double eval(double s) const {
    const double t = 1.0 - s;
    return 1.0 - m * t / (1.0 + b * t);
  }
};

// outer after inner: returns the representation of s -> outer(inner(s)).
LfRep lf_compose(const LfRep& outer, const LfRep& inner);

// Probability generating function on the non-negative integers.
// Supported families: linear-fractional, Poisson, geometric, finite table.
class PgfLaw {
 public:
  enum class Kind { LinearFractional, Poisson, Geometric, Table };

  static PgfLaw linear_fractional(double m, double b);
  static PgfLaw poisson(double lambda);
  static PgfLaw geometric(double q);
  // Normalizes if |sum - 1| <= 1e-9, rejects otherwise.
  static PgfLaw table(std::vector<double> probs);

  Kind kind() const { return kind_; }

  // F(s) = sum_j p_j s^j for s in [0,1].
  double eval(double s) const;

  // first moment
  double mean() const;

  // P(X = k)
  double pmf(long long k) const;

  // Standardized truncated second moment sum_{j>=a} j^2 p_j / mean^2.
  // Closed form for the linear-fractional family, adaptive tail summation
  // (relative tolerance 1e-10) otherwise. Requires mean() > 0.
  double theta(long long a) const;

  long long sample(Rng& rng) const;

  // Sum of `count` independent draws; switches to distribution-level batch
  // sampling above the individual-draw threshold.
  long long sample_sum(long long count, Rng& rng) const;

  // Present when the law lies in the linear-fractional family (including
  // the geometric special case m = b = q/(1-q)).
  std::optional<LfRep> as_lf() const;

  std::string describe() const;

  // parameter access for serialization
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  std::span<const double> table_probs() const { return probs_; }

 private:
  PgfLaw(Kind kind, double a, double b, std::vector<double> probs)
      : kind_(kind), a_(a), b_(b), probs_(std::move(probs)) {}

  Kind kind_;
  double a_ = 0.0;  // m / lambda / q, by kind
  double b_ = 0.0;  // LF curvature
  std::vector<double> probs_;
};

// F_{0,n}(s) = laws[0](laws[1](... laws[n-1](s) ...)); the empty chain is
// the identity. Uses the LfRep fast path when every law has one.
double compose_chain(std::span<const PgfLaw> laws, double s);

}  // namespace bpire
