#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/matrix.hpp"

namespace fraclab {

// A sequence of events given by exact measure oracles. Synthetic families
// are closed-form, so both oracles return exact rationals; `independent`
// marks families whose pair measure is exactly multiplicative, for which a
// Bernoulli-space backend computes ground-truth unions.
struct EventFamily {
  std::function<Rat(long)> measure;
  std::function<Rat(long, long)> pair_measure;
  bool independent = false;

  static EventFamily constant(const Rat& c);
  static EventFamily harmonic();  // mu(E_n) = 1/n
  static EventFamily independent_from(std::function<Rat(long)> mu);
  // Description file: keys `mu = const:<c> | harmonic`, `pair = independent`.
  static EventFamily from_file(const std::string& path);
};

struct BcConstants {
  Rat c_sharp = Rat(1);       // >= 1
  Rat c_star = Rat(2);        // >= 1; rounded up to a power of (1+eps_star)
  Rat eps_star = Rat(1, 4);   // > 0
  Rat d_const = Rat(1);       // >= 1
  double sigma = 0.5;         // in (0,1)
  double a = 1.0;             // in (0, 1/sigma]

  void validate() const;
};

// Chung-Erdos lower bound (sum mu)^2 / sum_{r,s} mu(F_r cap F_s) over the
// index set [M, N] (diagonal pairs use mu itself). Exact.
Rat chung_erdos(const EventFamily& events, long m_lo, long n_hi);
// Same restricted to an explicit index set.
Rat chung_erdos_subset(const EventFamily& events, const std::vector<long>& idx);

// Sparse subsequence selection: inside each C*-adic block pick the
// (1+eps*)-adic sub-block with maximal measure sum, then keep the even- or
// odd-indexed blocks, whichever preserves divergence.
struct SparseBlock {
  long k;             // C*-adic block index
  long ell;           // chosen (1+eps*)-adic sub-block
  Rat q;              // block start, exact
  long first, last;   // integer range [first, last] picked (empty: first>last)
  Rat mass;           // sum of measures over the block
};

struct SparseSelection {
  std::vector<SparseBlock> blocks;       // chosen sub-block of every k
  std::vector<long> chosen;              // the final index set J
  bool even_chosen;
  long ell_star;                         // C* = (1+eps*)^{ell*}
  Rat c_star_effective;
  Rat total_mass;                        // sum over all n <= N
  Rat selected_mass;                     // sum over J
};

SparseSelection sparse_select(const EventFamily& events,
                              const BcConstants& constants, long n_max);

// Full verification + bound report.
struct HypothesisCheck {
  std::string name;
  bool holds = true;
  std::string worst_pair;
  double margin = 0;
};

struct BcReport {
  std::vector<HypothesisCheck> hypotheses;
  bool all_hold = false;
  SparseSelection selection;
  Rat ce_bound_selected;       // Chung-Erdos on the selected subsequence
  Rat ce_bound_full;           // Chung-Erdos on [M, N]
  std::optional<Rat> exact_union_full;  // independent families only
  Rat union_lower_bound;       // best certified lower bound
  double double_sum_ratio;     // sum pair / (sum mu)^2 over [M, N]
};

BcReport bc_verify_and_bound(const EventFamily& events,
                             const BcConstants& constants, long m_lo,
                             long n_hi);

// Simplex lemma: rationals p/q with 0 < |q| < N inside a small box lie on
// one affine hyperplane. Box in the sup norm: center +/- radius.
struct SimplexResult {
  bool precondition_ok;         // Vol(B) < 1/(d! N^{d+1})
  std::vector<RatVec> points;   // Q(N) cap B, deduplicated
  bool hyperplane_found;
  RatVec hyperplane_normal;     // a with a . x = c for all points
  Rat hyperplane_offset;
  std::vector<RatVec> counterexample;  // d+1 affinely independent points
};

SimplexResult simplex_check(const RatVec& center, const Rat& radius, long n_den,
                            int d);

}  // namespace fraclab
