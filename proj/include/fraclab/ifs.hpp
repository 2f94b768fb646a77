#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraclab/matrix.hpp"

namespace fraclab {

// One contracting similarity f(x) = rho * rot * x + shift with exact data.
// rho = 1 with rot = Id, shift = 0 is allowed as the empty-word map.
struct SimilarityMap {
  Rat rho;
  RatMat rot;
  RatVec shift;

  RatVec apply(const RatVec& x) const;
  SimilarityMap compose(const SimilarityMap& inner) const;  // this ∘ inner
  static SimilarityMap identity(int dim);
  bool is_identity_map() const;
};

// Word over the IFS alphabet; letters index RationalIfs::maps.
using Word = std::vector<int>;

class RationalIfs {
 public:
  // Validates all invariants: probabilities sum to 1 and are positive,
  // rotations exactly orthogonal with det 1, 0 < rho_i < 1, and every
  // datum lies in Z[S^-1] for the computed prime set S.
  RationalIfs(int dim, std::vector<SimilarityMap> maps, std::vector<Rat> lambda);

  // Missing-digit IFS in base `base` with the given digits, uniform weights.
  static RationalIfs missing_digit(long base, const std::vector<long>& digits);

  // Reads the plain-text description format (keys dim/alphabet/rho.<i>/...,
  // or the missing_digit shorthand).
  static RationalIfs from_file(const std::string& path);
  static RationalIfs from_spec_string(const std::string& spec);

  int dim() const { return dim_; }
  int alphabet_size() const { return static_cast<int>(maps_.size()); }
  const SimilarityMap& map(int i) const { return maps_.at(i); }
  const Rat& lambda(int i) const { return lambda_.at(i); }
  const std::vector<Rat>& lambdas() const { return lambda_; }
  const std::set<long>& primes() const { return primes_; }

  Rat rho_min() const;
  Rat rho_max() const;
  Rat lambda_min() const;
  Rat lambda_max() const;
  Rat average_contraction() const;  // r = sum lambda_i rho_i

  bool is_missing_digit(long* base_out = nullptr) const;

  // f_w = f_{w1} ∘ ... ∘ f_{wk}; empty word gives the identity map.
  SimilarityMap compose_word(const Word& w) const;
  Rat word_rho(const Word& w) const;
  Rat cylinder_measure(const Word& w) const;  // lambda_w

  // P_lambda^k(f)(x) by full enumeration; exact when f is exact.
  // Throws DomainError if |alphabet|^k exceeds `enumeration_cap`.
  Rat markov_iterate(const std::function<Rat(const RatVec&)>& f, const RatVec& x,
                     int k, long enumeration_cap = 10000000L) const;
  // Sampling fallback for deep iterations.
  double markov_sample(const std::function<double(const RatVec&)>& f,
                       const RatVec& x, int k, long samples, Rng& rng) const;

  // Draws a lambda-random word of length `depth` and returns f_{w}(0)
  // together with an exact upper bound on the distance to the limit point
  // pi(alpha) (sup-norm valid bound).
  struct SamplePoint {
    RatVec point;
    Word word;
    Rat bound;  // |f_{w}(0) - pi(alpha)| <= bound (exact, sup norm)
  };
  SamplePoint sample_point(int depth, Rng& rng) const;
  // Same conditioned on a fixed prefix.
  SamplePoint sample_point_with_prefix(const Word& prefix, int depth,
                                       Rng& rng) const;

  // Exact rational upper bound on sup_{x in K} |x|_infty.
  Rat attractor_radius_bound() const;

  // Complete prefix set P(eps): minimal words with eps*rho_min <= rho_w < eps.
  std::vector<Word> prefix_set(const Rat& eps) const;

  // Solves sum rho_i^s = 1 by bisection to 1e-12.
  double moran_dimension() const;

  // (sum lambda_i tau_i)^n, optionally cross-checked against the full
  // length-n enumeration (exact equality assertion).
  Rat cocycle_average(const std::vector<Rat>& tau, int n,
                      bool verify_by_enumeration = false) const;

  // Open-set-condition check on an open axis box (lo_i, hi_i): images must
  // stay inside the box and be pairwise disjoint. Exact.
  bool verify_osc(const RatVec& lo, const RatVec& hi) const;

  // Empirical conditional density mu(A | K_w) with binomial standard error.
  struct DensityEstimate {
    double estimate;
    double stderr_;
    long hits;
    long samples;
  };
  DensityEstimate cylinder_density(const Word& w,
                                   const std::function<bool(const RatVec&)>& pred,
                                   long samples, std::uint64_t seed,
                                   int depth = 64) const;

  // Serializes in the description file format.
  std::string to_description() const;

 private:
  void check_letter(int i) const;
  int dim_;
  std::vector<SimilarityMap> maps_;
  std::vector<Rat> lambda_;
  std::vector<Rat> lambda_cum_;
  std::set<long> primes_;
};

// Collects the primes dividing `x` (|x| > 1 integer part).
std::set<long> prime_factors(const Int& x);

}  // namespace fraclab
