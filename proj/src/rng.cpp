#include "bpire/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bpire {

std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t index, std::uint64_t salt) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ tag);
  h = mix64(h + salt * 0xd1342543de82ef95ull);
  h = mix64(h ^ (index * 0xaf251af3b0f025b5ull));
  return h;
}

namespace {

// Walks outward from the mode (m, m+1, m-1, m+2, ...) accumulating pmf mass
// until the uniform draw is covered. `ratio_up(k)` = p(k+1)/p(k),
// `ratio_down(k)` = p(k-1)/p(k). Expected cost O(sd of the distribution).
template <typename RatioUp, typename RatioDown>
long long mode_centered_inversion(long long mode, double pmf_mode,
                                  long long lo, long long hi, RatioUp ratio_up,
                                  RatioDown ratio_down, Rng& rng) {
  const double u = rng.uniform();
  double cum = pmf_mode;
  if (u < cum) return mode;
  double pr = pmf_mode;  // pmf at the right cursor
  double pl = pmf_mode;  // pmf at the left cursor
  long long r = mode, l = mode;
  for (int guard = 0; guard < 1 << 26; ++guard) {
    bool moved = false;
    if (r < hi) {
      pr *= ratio_up(r);
      ++r;
      cum += pr;
      moved = true;
      if (u < cum) return r;
    }
    if (l > lo) {
      pl *= ratio_down(l);
      --l;
      cum += pl;
      moved = true;
      if (u < cum) return l;
    }
    if (!moved) return r;  // support exhausted; return the top of the scan
    if (pr + pl < 1e-300 && cum > 1.0 - 1e-12) return r;
  }
  throw std::runtime_error("mode_centered_inversion: failed to converge");
}

double log_factorial(double n) { return std::lgamma(n + 1.0); }

}  // namespace

long long sample_poisson(double lambda, Rng& rng) {
  if (lambda < 0) throw std::domain_error("sample_poisson: lambda < 0");
  if (lambda == 0) return 0;
  if (lambda <= 30.0) {
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double cum = p;
    long long k = 0;
    const long long kmax =
        static_cast<long long>(lambda + 40.0 * std::sqrt(lambda) + 50.0);
    while (u >= cum && k < kmax) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cum += p;
    }
    return k;
  }
  const long long mode = static_cast<long long>(std::floor(lambda));
  const double log_pmf =
      -lambda + static_cast<double>(mode) * std::log(lambda) -
      log_factorial(static_cast<double>(mode));
  return mode_centered_inversion(
      mode, std::exp(log_pmf), 0, (1ll << 62),
      [lambda](long long k) { return lambda / static_cast<double>(k + 1); },
      [lambda](long long k) { return static_cast<double>(k) / lambda; }, rng);
}

long long sample_geometric0(double q, Rng& rng) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("sample_geometric0: q");
  if (q == 0.0) return 0;
  // P(K >= k) = q^k, so K = floor(log(u)/log(q)) with u in (0,1].
  const double u = rng.uniform_pos();
  const double k = std::floor(std::log(u) / std::log(q));
  return k < 0 ? 0 : static_cast<long long>(k);
}

long long sample_binomial(long long n, double p, Rng& rng) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0))
    throw std::domain_error("sample_binomial: parameters");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
  const double np = static_cast<double>(n) * p;
  if (np <= 30.0) {
    const double u = rng.uniform();
    const double odds = p / (1.0 - p);
    double t = std::exp(static_cast<double>(n) * std::log1p(-p));
    double cum = t;
    long long k = 0;
    while (u >= cum && k < n) {
      t *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
      ++k;
      cum += t;
    }
    return k;
  }
  const long long mode = static_cast<long long>(
      std::floor((static_cast<double>(n) + 1.0) * p));
  const double nm = static_cast<double>(mode);
  const double log_pmf = log_factorial(static_cast<double>(n)) -
                         log_factorial(nm) -
                         log_factorial(static_cast<double>(n) - nm) +
                         nm * std::log(p) +
                         (static_cast<double>(n) - nm) * std::log1p(-p);
  const double odds = p / (1.0 - p);
  return mode_centered_inversion(
      mode, std::exp(log_pmf), 0, n,
      [n, odds](long long k) {
        return odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
      },
      [n, odds](long long k) {
        return static_cast<double>(k) /
               (odds * static_cast<double>(n - k + 1));
      },
      rng);
}

long long sample_negative_binomial(long long k, double q, Rng& rng) {
  if (k < 0 || !(q >= 0.0 && q < 1.0))
    throw std::domain_error("sample_negative_binomial: parameters");
  if (k == 0 || q == 0.0) return 0;
  const double kk = static_cast<double>(k);
  const double mean = kk * q / (1.0 - q);
  if (mean <= 30.0) {
    const double u = rng.uniform();
    double t = std::exp(kk * std::log1p(-q));
    double cum = t;
    long long j = 0;
    const long long jmax = static_cast<long long>(
        mean + 60.0 * std::sqrt(mean / (1.0 - q)) + 60.0);
    while (u >= cum && j < jmax) {
      t *= q * (kk + static_cast<double>(j)) / static_cast<double>(j + 1);
      ++j;
      cum += t;
    }
    return j;
  }
  const long long mode =
      static_cast<long long>(std::floor(q * (kk - 1.0) / (1.0 - q)));
  const double jm = static_cast<double>(mode);
  const double log_pmf = std::lgamma(kk + jm) - log_factorial(jm) -
                         std::lgamma(kk) + kk * std::log1p(-q) +
                         jm * std::log(q);
  return mode_centered_inversion(
      mode, std::exp(log_pmf), 0, (1ll << 62),
      [kk, q](long long j) {
        return q * (kk + static_cast<double>(j)) / static_cast<double>(j + 1);
      },
      [kk, q](long long j) {
        return static_cast<double>(j) /
               (q * (kk + static_cast<double>(j) - 1.0));
      },
      rng);
}

std::size_t sample_table(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.empty() ? 0 : probs.size() - 1;
}

}  // namespace bpire
