#include "bpire/laws.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bpire {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::domain_error(what);
}

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::domain_error("pgf argument outside [0,1]");
}

constexpr long long kBatchThreshold = 10000;

}  // namespace

LfRep lf_compose(const LfRep& outer, const LfRep& inner) {
  return LfRep{outer.m * inner.m, inner.b + outer.b * inner.m};
}

PgfLaw PgfLaw::linear_fractional(double m, double b) {
  require(std::isfinite(m) && m > 0.0, "linear-fractional: m must be > 0");
  require(std::isfinite(b) && b >= 0.0, "linear-fractional: b must be >= 0");
  require(m <= 1.0 + b, "linear-fractional: need m <= 1+b");
  return PgfLaw(Kind::LinearFractional, m, b, {});
}

PgfLaw PgfLaw::poisson(double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0, "poisson: lambda must be > 0");
  return PgfLaw(Kind::Poisson, lambda, 0.0, {});
}

PgfLaw PgfLaw::geometric(double q) {
  require(q > 0.0 && q < 1.0, "geometric: q must be in (0,1)");
  return PgfLaw(Kind::Geometric, q, 0.0, {});
}

PgfLaw PgfLaw::table(std::vector<double> probs) {
  require(!probs.empty(), "table: empty probability list");
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, "table: negative entry");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "table: probabilities sum to " +
                                           std::to_string(sum) +
                                           ", outside 1 +/- 1e-9");
  for (double& p : probs) p /= sum;
  while (probs.size() > 1 && probs.back() == 0.0) probs.pop_back();
  return PgfLaw(Kind::Table, 0.0, 0.0, std::move(probs));
}

double PgfLaw::eval(double s) const {
  check_s(s);
  switch (kind_) {
    case Kind::LinearFractional:
      return LfRep{a_, b_}.eval(s);
    case Kind::Poisson:
      return std::exp(a_ * (s - 1.0));
    case Kind::Geometric:
      return (1.0 - a_) / (1.0 - a_ * s);
    case Kind::Table: {
      // Horner
      double acc = 0.0;
      for (std::size_t i = probs_.size(); i-- > 0;) acc = acc * s + probs_[i];
      return acc;
    }
  }
  return 0.0;
}

double PgfLaw::mean() const {
  switch (kind_) {
    case Kind::LinearFractional:
      return a_;
    case Kind::Poisson:
      return a_;
    case Kind::Geometric:
      return a_ / (1.0 - a_);
    case Kind::Table: {
      double acc = 0.0;
      for (std::size_t j = 1; j < probs_.size(); ++j)
        acc += static_cast<double>(j) * probs_[j];
      return acc;
    }
  }
  return 0.0;
}

double PgfLaw::pmf(long long k) const {
  if (k < 0) return 0.0;
  switch (kind_) {
    case Kind::LinearFractional: {
      const double q = b_ / (1.0 + b_);
      if (k == 0) return 1.0 - a_ / (1.0 + b_);
      return a_ * std::pow(q, static_cast<double>(k - 1)) /
             ((1.0 + b_) * (1.0 + b_));
    }
    case Kind::Poisson:
      return std::exp(-a_ + static_cast<double>(k) * std::log(a_) -
                      std::lgamma(static_cast<double>(k) + 1.0));
    case Kind::Geometric:
      return (1.0 - a_) * std::pow(a_, static_cast<double>(k));
    case Kind::Table:
      return k < static_cast<long long>(probs_.size())
                 ? probs_[static_cast<std::size_t>(k)]
                 : 0.0;
  }
  return 0.0;
}

namespace {

// sum_{j>=a} j^2 y^{j-1} = y^{a-1} (a^2 - (2a^2-2a-1) y + (a-1)^2 y^2) / (1-y)^3
double tail_j2_geometric(long long a, double y) {
  if (a < 1) a = 1;
  const double aa = static_cast<double>(a);
  const double num =
      aa * aa - (2.0 * aa * aa - 2.0 * aa - 1.0) * y + (aa - 1.0) * (aa - 1.0) * y * y;
  const double om = 1.0 - y;
  return std::pow(y, static_cast<double>(a - 1)) * num / (om * om * om);
}

}  // namespace

double PgfLaw::theta(long long a) const {
  require(a >= 1, "theta: a must be a positive integer");
  const double mu = mean();
  require(mu > 0.0, "theta: zero mean (degenerate law rejected)");
  const double mu2 = mu * mu;
  switch (kind_) {
    case Kind::LinearFractional: {
      const double q = b_ / (1.0 + b_);
      if (q == 0.0) return a <= 1 ? 1.0 / a_ : 0.0;  // mass only on {0,1}
      const double s2 = a_ / ((1.0 + b_) * (1.0 + b_)) * tail_j2_geometric(a, q);
      return s2 / mu2;
    }
    case Kind::Geometric: {
      // LF special case with m = b = q/(1-q)
      const double m = a_ / (1.0 - a_);
      return PgfLaw::linear_fractional(m, m).theta(a);
    }
    case Kind::Table: {
      double acc = 0.0;
      for (std::size_t j = static_cast<std::size_t>(a); j < probs_.size(); ++j)
        acc += static_cast<double>(j) * static_cast<double>(j) * probs_[j];
      return acc / mu2;
    }
    case Kind::Poisson: {
      // adaptive tail summation, relative tolerance 1e-10
      const double lambda = a_;
      long long j = a;
      double term = std::exp(-lambda + static_cast<double>(j) * std::log(lambda) -
                             std::lgamma(static_cast<double>(j) + 1.0));
      double acc = 0.0;
      const long long far =
          static_cast<long long>(lambda + 60.0 * std::sqrt(lambda) + 200.0);
      for (; j < far || term * static_cast<double>(j) * static_cast<double>(j) >
                            1e-10 * (acc > 0 ? acc : 1e-300);
           ++j) {
        acc += static_cast<double>(j) * static_cast<double>(j) * term;
        term *= lambda / static_cast<double>(j + 1);
        if (term < 1e-320) break;
      }
      return acc / mu2;
    }
  }
  return 0.0;
}

long long PgfLaw::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::LinearFractional: {
      // atom at 0 with probability 1 - m/(1+b), else 1 + Geometric0(q)
      const double p_pos = a_ / (1.0 + b_);
      if (rng.uniform() >= p_pos) return 0;
      const double q = b_ / (1.0 + b_);
      return 1 + sample_geometric0(q, rng);
    }
    case Kind::Poisson:
      return sample_poisson(a_, rng);
    case Kind::Geometric:
      return sample_geometric0(a_, rng);
    case Kind::Table:
      return static_cast<long long>(sample_table(probs_, rng));
  }
  return 0;
}

long long PgfLaw::sample_sum(long long count, Rng& rng) const {
  require(count >= 0, "sample_sum: negative count");
  if (count == 0) return 0;
  if (count < kBatchThreshold) {
    long long acc = 0;
    for (long long i = 0; i < count; ++i) acc += sample(rng);
    return acc;
  }
  switch (kind_) {
    case Kind::LinearFractional: {
      const double p_pos = a_ / (1.0 + b_);
      const double q = b_ / (1.0 + b_);
      const long long k = sample_binomial(count, p_pos, rng);
      return k + sample_negative_binomial(k, q, rng);
    }
    case Kind::Poisson:
      return sample_poisson(static_cast<double>(count) * a_, rng);
    case Kind::Geometric:
      return sample_negative_binomial(count, a_, rng);
    case Kind::Table: {
      // multinomial counts via sequential binomials
      long long remaining = count;
      double mass = 1.0;
      long long acc = 0;
      for (std::size_t j = 0; j + 1 < probs_.size() && remaining > 0; ++j) {
        const double p = mass > 0 ? std::min(1.0, probs_[j] / mass) : 1.0;
        const long long nj = sample_binomial(remaining, p, rng);
        acc += static_cast<long long>(j) * nj;
        remaining -= nj;
        mass -= probs_[j];
      }
      acc += static_cast<long long>(probs_.size() - 1) * remaining;
      return acc;
    }
  }
  return 0;
}

std::optional<LfRep> PgfLaw::as_lf() const {
  switch (kind_) {
    case Kind::LinearFractional:
      return LfRep{a_, b_};
    case Kind::Geometric: {
      const double m = a_ / (1.0 - a_);
      return LfRep{m, m};
    }
    default:
      return std::nullopt;
  }
}

std::string PgfLaw::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::LinearFractional:
      os << "lf(m=" << a_ << ",b=" << b_ << ")";
      break;
    case Kind::Poisson:
      os << "poisson(" << a_ << ")";
      break;
    case Kind::Geometric:
      os << "geometric(" << a_ << ")";
      break;
    case Kind::Table:
      os << "table[" << probs_.size() << "]";
      break;
  }
  return os.str();
}

double compose_chain(std::span<const PgfLaw> laws, double s) {
  check_s(s);
  bool all_lf = true;
  for (const auto& law : laws)
    if (!law.as_lf()) {
      all_lf = false;
      break;
    }
  if (all_lf) {
    LfRep rep;  // identity
    for (const auto& law : laws) rep = lf_compose(rep, *law.as_lf());
    return rep.eval(s);
  }
  double v = s;
  for (std::size_t i = laws.size(); i-- > 0;) v = laws[i].eval(v);
  return v;
}

}  // namespace bpire
