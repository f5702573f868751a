#include <cmath>
#include <vector>

#include <doctest.h>

#include "bpire/laws.hpp"
#include "bpire/parallel.hpp"
#include "bpire/rng.hpp"

using namespace bpire;

TEST_SUITE_BEGIN("laws");

TEST_CASE("eval closed forms") {
  CHECK(PgfLaw::poisson(1.0).eval(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(PgfLaw::linear_fractional(0.5, 0.5).eval(0.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(PgfLaw::geometric(0.4).eval(0.0) == doctest::Approx(0.6).epsilon(1e-14));
  const std::vector<PgfLaw> laws = {
      PgfLaw::linear_fractional(0.5, 0.5), PgfLaw::poisson(2.5),
      PgfLaw::geometric(0.3), PgfLaw::table({0.5, 0.25, 0.25})};
  for (const auto& law : laws) CHECK(std::abs(law.eval(1.0) - 1.0) <= 1e-12);
}

TEST_CASE("eval monotone in s") {
  const std::vector<PgfLaw> laws = {
      PgfLaw::linear_fractional(1.2, 0.7), PgfLaw::poisson(1.7),
      PgfLaw::geometric(0.6), PgfLaw::table({0.1, 0.2, 0.3, 0.4})};
  for (const auto& law : laws) {
    double prev = law.eval(0.0);
    for (int i = 1; i <= 50; ++i) {
      const double v = law.eval(i / 50.0);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("mean") {
  CHECK(PgfLaw::linear_fractional(0.5, 0.5).mean() == 0.5);
  CHECK(PgfLaw::poisson(1.0).mean() == 1.0);
  CHECK(PgfLaw::table({0.5, 0.25, 0.25}).mean() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(PgfLaw::geometric(0.4).mean() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("parameter domain") {
  CHECK_THROWS_AS(PgfLaw::linear_fractional(2.0, 0.5), std::domain_error);
  CHECK_NOTHROW(PgfLaw::linear_fractional(2.0, 1.0));  // boundary m = 1+b
  CHECK_THROWS_AS(PgfLaw::poisson(-1.0), std::domain_error);
  CHECK_THROWS_AS(PgfLaw::poisson(0.0), std::domain_error);
  CHECK_THROWS_AS(PgfLaw::geometric(1.2), std::domain_error);
  CHECK_THROWS_AS(PgfLaw::table({0.5, 0.4}), std::domain_error);
  CHECK_NOTHROW(PgfLaw::table({0.5, 0.5 + 5e-10}));  // normalized on ingestion
}

TEST_CASE("lf_compose closed form") {
  const LfRep id{1.0, 0.0};
  const LfRep a{0.5, 0.5};
  const LfRep aa = lf_compose(a, id);
  CHECK(aa.m == 0.5);
  CHECK(aa.b == 0.5);

  const LfRep sq = lf_compose(a, a);
  CHECK(sq.m == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sq.b == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sq.eval(0.0) == doctest::Approx(6.0 / 7.0).epsilon(1e-14));

  const LfRep c = lf_compose(LfRep{2.0, 1.0}, LfRep{3.0, 2.0});
  CHECK(c.m == 6.0);
  CHECK(c.b == 5.0);
}

TEST_CASE("lf_compose equals iterated eval") {
  Rng rng(derive_stream(7, hash_tag("laws-compose"), 0));
  for (int trial = 0; trial < 300; ++trial) {
    const double b1 = 3.0 * rng.uniform(), b2 = 3.0 * rng.uniform();
    const LfRep f{(1.0 + b1) * (0.05 + 0.95 * rng.uniform()), b1};
    const LfRep g{(1.0 + b2) * (0.05 + 0.95 * rng.uniform()), b2};
    const LfRep fg = lf_compose(f, g);
    for (int k = 0; k <= 100; ++k) {
      const double s = k / 100.0;
      CHECK(std::abs(fg.eval(s) - f.eval(g.eval(s))) <= 1e-12);
      CHECK(fg.eval(s) >= -1e-15);
      CHECK(fg.eval(s) <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("compose_chain") {
  const PgfLaw lf = PgfLaw::linear_fractional(0.5, 0.5);
  CHECK(compose_chain({}, 0.42) == 0.42);
  std::vector<PgfLaw> one = {lf};
  CHECK(compose_chain(one, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  std::vector<PgfLaw> two = {lf, lf};
  CHECK(compose_chain(two, 0.0) == doctest::Approx(6.0 / 7.0).epsilon(1e-14));

  // fast path agrees with plain nested evaluation
  Rng rng(derive_stream(11, hash_tag("laws-chain"), 0));
  std::vector<PgfLaw> chain;
  for (int i = 0; i < 12; ++i) {
    const double b = 2.0 * rng.uniform();
    chain.push_back(PgfLaw::linear_fractional((1.0 + b) * rng.uniform() + 0.01, b));
  }
  for (double s : {0.0, 0.3, 0.9, 1.0}) {
    double nested = s;
    for (std::size_t i = chain.size(); i-- > 0;) nested = chain[i].eval(nested);
    CHECK(compose_chain(chain, s) == doctest::Approx(nested).epsilon(1e-12));
  }

  // mixed chain takes the numeric route
  chain.push_back(PgfLaw::poisson(0.8));
  double nested = 0.0;
  for (std::size_t i = chain.size(); i-- > 0;) nested = chain[i].eval(nested);
  CHECK(compose_chain(chain, 0.0) == doctest::Approx(nested).epsilon(1e-14));
}

TEST_CASE("compose_chain monotone in horizon") {
  Rng rng(derive_stream(3, hash_tag("laws-mono"), 0));
  std::vector<PgfLaw> chain;
  for (int i = 0; i < 25; ++i) {
    if (i % 3 == 0)
      chain.push_back(PgfLaw::poisson(0.2 + rng.uniform()));
    else {
      const double b = 2.0 * rng.uniform();
      chain.push_back(
          PgfLaw::linear_fractional((1.0 + b) * (0.05 + 0.9 * rng.uniform()), b));
    }
  }
  double prev = 0.0;
  for (std::size_t n = 0; n <= chain.size(); ++n) {
    const double v = compose_chain(std::span(chain.data(), n), 0.0);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("theta closed forms") {
  CHECK(PgfLaw::linear_fractional(0.5, 0.5).theta(1) ==
        doctest::Approx(4.0).epsilon(1e-13));
  CHECK(PgfLaw::poisson(1.0).theta(1) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(PgfLaw::table({1.0}).theta(1), std::domain_error);
}

TEST_CASE("theta tail formula vs direct pmf summation") {
  // independent oracle: brute-force sum of j^2 pmf(j) over the tail
  auto brute = [](const PgfLaw& law, long long a) {
    double acc = 0.0;
    for (long long j = a; j < 4000; ++j)
      acc += static_cast<double>(j) * static_cast<double>(j) * law.pmf(j);
    return acc / (law.mean() * law.mean());
  };
  for (double m : {0.3, 0.8, 1.4}) {
    for (double b : {0.5, 1.0, 2.5}) {
      if (m > 1.0 + b) continue;
      const PgfLaw law = PgfLaw::linear_fractional(m, b);
      for (long long a : {1, 2, 3, 7})
        CHECK(law.theta(a) == doctest::Approx(brute(law, a)).epsilon(1e-9));
    }
  }
  for (double lam : {0.5, 2.0}) {
    const PgfLaw law = PgfLaw::poisson(lam);
    for (long long a : {1, 2, 5})
      CHECK(law.theta(a) == doctest::Approx(brute(law, a)).epsilon(1e-8));
  }
  const PgfLaw geo = PgfLaw::geometric(0.55);
  for (long long a : {1, 2, 4})
    CHECK(geo.theta(a) == doctest::Approx(brute(geo, a)).epsilon(1e-9));
}

TEST_CASE("theta second-moment inequality") {
  const std::vector<PgfLaw> laws = {
      PgfLaw::linear_fractional(0.9, 1.5), PgfLaw::poisson(0.7),
      PgfLaw::geometric(0.35), PgfLaw::table({0.2, 0.5, 0.3})};
  for (const auto& law : laws)
    CHECK(law.theta(1) * law.mean() * law.mean() >= law.mean() - 1e-12);
}

TEST_CASE("pmf is consistent with eval") {
  const std::vector<PgfLaw> laws = {
      PgfLaw::linear_fractional(0.8, 1.2), PgfLaw::poisson(1.3),
      PgfLaw::geometric(0.45), PgfLaw::table({0.25, 0.5, 0.25})};
  for (const auto& law : laws) {
    for (double s : {0.0, 0.4, 0.85, 1.0}) {
      double acc = 0.0, sk = 1.0;
      for (long long k = 0; k < 300; ++k) {
        acc += law.pmf(k) * sk;
        sk *= s;
      }
      CHECK(law.eval(s) == doctest::Approx(acc).epsilon(1e-10));
    }
  }
}

namespace {

double chi_square_vs_pmf(const PgfLaw& law, std::uint64_t draws,
                         std::uint64_t stream) {
  Rng rng(derive_stream(17, hash_tag("laws-chi2"), stream));
  const int top = 32;
  std::vector<std::uint64_t> counts(top + 1, 0);
  for (std::uint64_t i = 0; i < draws; ++i) {
    const long long k = law.sample(rng);
    ++counts[static_cast<std::size_t>(std::min<long long>(k, top))];
  }
  double chi2 = 0.0;
  int df = -1;
  double tail = 1.0;
  for (int k = 0; k < top; ++k) {
    const double p = law.pmf(k);
    tail -= p;
    const double expect = p * static_cast<double>(draws);
    if (expect < 5.0) continue;
    const double d = static_cast<double>(counts[static_cast<std::size_t>(k)]) - expect;
    chi2 += d * d / expect;
    ++df;
  }
  const double expect_tail = std::max(0.0, tail) * static_cast<double>(draws);
  if (expect_tail >= 5.0) {
    const double d = static_cast<double>(counts[top]) - expect_tail;
    chi2 += d * d / expect_tail;
    ++df;
  }
  // normalized exceedance over the 4-sigma chi-square band
  return (chi2 - df) / std::sqrt(2.0 * df);
}

}  // namespace

TEST_CASE("sampling matches pmf (chi-square at 1e6 draws)") {
  CHECK(chi_square_vs_pmf(PgfLaw::linear_fractional(0.5, 0.5), 1000000, 1) < 4.0);
  CHECK(chi_square_vs_pmf(PgfLaw::poisson(1.0), 1000000, 2) < 4.0);
  CHECK(chi_square_vs_pmf(PgfLaw::geometric(0.4), 1000000, 3) < 4.0);
  CHECK(chi_square_vs_pmf(PgfLaw::table({0.1, 0.3, 0.4, 0.2}), 1000000, 4) < 4.0);
}

TEST_CASE("sampling moments") {
  const PgfLaw det = PgfLaw::table({0.0, 1.0});
  Rng rng(derive_stream(23, hash_tag("laws-mom"), 0));
  for (int i = 0; i < 100; ++i) CHECK(det.sample(rng) == 1);

  const PgfLaw lf = PgfLaw::linear_fractional(0.5, 0.5);
  MeanVar acc;
  for (int i = 0; i < 1000000; ++i) acc.add(static_cast<double>(lf.sample(rng)));
  CHECK(std::abs(acc.mean - 0.5) <= 3.0 * acc.std_error());

  const PgfLaw po = PgfLaw::poisson(1.0);
  MeanVar zero;
  for (int i = 0; i < 1000000; ++i) zero.add(po.sample(rng) == 0 ? 1.0 : 0.0);
  CHECK(std::abs(zero.mean - std::exp(-1.0)) <= 3.0 * zero.std_error());
}

TEST_CASE("batch offspring sums match individual draws statistically") {
  Rng rng(derive_stream(29, hash_tag("laws-batch"), 0));
  const std::vector<PgfLaw> laws = {
      PgfLaw::linear_fractional(0.9, 1.0), PgfLaw::poisson(0.8),
      PgfLaw::geometric(0.45), PgfLaw::table({0.3, 0.4, 0.2, 0.1})};
  const long long count = 20000;  // above the batch threshold
  for (const auto& law : laws) {
    MeanVar acc;
    for (int rep = 0; rep < 300; ++rep)
      acc.add(static_cast<double>(law.sample_sum(count, rng)));
    const double want = static_cast<double>(count) * law.mean();
    CHECK(std::abs(acc.mean - want) <= 4.0 * acc.std_error());
  }
}

TEST_SUITE_END();
