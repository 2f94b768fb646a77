#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

// Exact rational scalar. All "exact" claims in this library bottom out here.
using Rat = mpq_class;
using Int = mpz_class;

inline double to_d(const Rat& x) { return x.get_d(); }

// mpq_class(a, b) does NOT canonicalize, and comparisons require canonical
// form; use this whenever numerator and denominator may share a factor.
inline Rat make_rat(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}
inline Rat make_rat(long num, long den) { return make_rat(Int(num), Int(den)); }

// Parses "3", "-7/12" or a plain decimal like "0.25" (exactly).
Rat parse_rat(const std::string& s);

// Canonical serialization: "num" or "num/den" in lowest terms.
std::string rat_str(const Rat& x);

Rat pow_rat(const Rat& base, long e);
Int pow_int(unsigned long base, unsigned long e);

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

// Exact rational upper bound for sqrt(x), x >= 0.
Rat sqrt_upper(const Rat& x);

// floor(log_base(x)) style helpers are not needed; comparisons are done in
// exact form by the callers.

// Deterministic RNG used across the library so seeded runs are reproducible
// independently of the platform's std::uniform_* implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), n > 0.
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free multiply-shift; bias is negligible for n << 2^64 and
    // irrelevant for statistical use, but we keep the rejection loop so the
    // distribution is exactly uniform.
    std::uint64_t threshold = (-n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0,1) with 53 random bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Draws an index according to a probability vector given by cumulative
  // rational weights scaled to a common denominator; used by IFS sampling.
  // `cum` holds exact cumulative sums with cum.back() == total.
  std::size_t next_weighted(const std::vector<Rat>& cum);

  // Derives an independent stream for worker/trial `index`.
  static Rng derive(std::uint64_t master_seed, std::uint64_t index) {
    Rng r(master_seed ^ (0x5851f42d4c957f2dULL * (index + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fraclab
