#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace bpire {

// Counter-based generator: the state advances by a fixed odd increment and
// the output is a bijective finalizer of the counter (splitmix64). Streams
// are decorrelated by hashing (seed, purpose tag, stream index) into the
// starting counter, so any (seed, stream) pair reproduces bit-identically
// on every platform, independent of how work is scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform on [0,1), 53 random bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1], safe as a log() argument
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  std::uint64_t key() const { return state_; }

 private:
  std::uint64_t state_;
};

// Stable 64-bit hash of a purpose tag (FNV-1a).
std::uint64_t hash_tag(std::string_view tag);

// Derives the starting counter for stream `index` of purpose `tag` under
// `seed`. Extra context (e.g. the kernel index n) goes into `salt`.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t index, std::uint64_t salt = 0);

// --- discrete samplers -----------------------------------------------------
//
// All samplers are exact inversions of the target pmf with respect to a
// fixed enumeration order, driven by a single uniform draw (plus pmf
// recurrences), so a (seed, stream) pair fixes the sample path.

// Poisson(lambda). Sequential inversion for small lambda, mode-centered
// inversion (pmf recurrences from the mode) for large.
long long sample_poisson(double lambda, Rng& rng);

// Geometric on {0,1,2,...} with P(k) = (1-q) q^k.
long long sample_geometric0(double q, Rng& rng);

// Binomial(n, p).
long long sample_binomial(long long n, double p, Rng& rng);

// Negative binomial: sum of k independent Geometric0(q) variables,
// P(j) = C(k+j-1, j) (1-q)^k q^j.
long long sample_negative_binomial(long long k, double q, Rng& rng);

// Inversion over a (small) probability table; linear scan.
std::size_t sample_table(const std::vector<double>& probs, Rng& rng);

}  // namespace bpire
