#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraclab/ifs.hpp"
#include "fraclab/matrix.hpp"

namespace fraclab {

// p-adic absolute value as an exact power of p: value = p^exp.
struct PPower {
  long exp = 0;
  bool infinite = false;  // |0|_p sentinel

  double value(long p) const;
  bool operator==(const PPower& o) const {
    return infinite == o.infinite && (infinite || exp == o.exp);
  }
};

long padic_valuation(const Int& x, long p);   // x != 0
long padic_valuation(const Rat& x, long p);   // x != 0
PPower padic_norm(const Rat& x, long p);      // |x|_p; |0|_p = sentinel
PPower padic_norm(const RatMat& m, long p);   // max over entries

bool is_prime(long p);

// p-adic Cartan exponents n_1 >= ... >= n_{d+1}, normalized so the minimum
// is 0, computed from the Smith-normal-form p-valuations of the matrix.
struct KakExponents {
  std::vector<long> exps;
  long top() const { return exps.front(); }
  bool operator==(const KakExponents& o) const { return exps == o.exps; }
};
KakExponents kak_exponents(const RatMat& m, long p);

// Operator norm of Ad_g on trace-zero matrices: p^{n_1} at a finite place,
// largest singular value at the Archimedean place (tolerance ~1e-10).
PPower adjoint_norm_p(const RatMat& m, long p);
double adjoint_norm_inf(const RatMat& m);

// Element of the S-arithmetic group PGL_{d+1}(R) x PGL_{d+1}(Q_f): a pair of
// rational matrices modulo nonzero scalars.
class SElement {
 public:
  SElement(RatMat arch, RatMat fin, std::set<long> primes);

  static SElement identity(int n, std::set<long> primes);

  const RatMat& arch() const { return arch_; }
  const RatMat& fin() const { return fin_; }
  const std::set<long>& primes() const { return primes_; }

  SElement operator*(const SElement& o) const;
  SElement inverse() const;
  bool operator==(const SElement& o) const;

  std::string serialize() const;  // two row-major rational matrices

 private:
  RatMat arch_, fin_;
  std::set<long> primes_;
};

// Canonical projective representative: integer entries, content 1, first
// nonzero entry positive.
RatMat projective_normalize(const RatMat& m);
bool projectively_equal(const RatMat& a, const RatMat& b);

// gamma_w = u(0, -b_w) a(rho_w, rho_w) (k_w, k_w):
//   arch = a(rho_w) k_w, fin = u(-b_w) a(rho_w) k_w.
SElement gamma_element(const RationalIfs& ifs, const Word& w);

// gamma-tilde_w = u(-b_w, 0) gamma_w; both components coincide and the
// element lies in the S-arithmetic lattice.
RatMat gamma_tilde(const RationalIfs& ifs, const Word& w);

// Exact projective check of gamma_w u(x,0) gamma_w^{-1} u(b_w,0) = u(f_w(x),0)
// on both components.
bool verify_key_identity(const RationalIfs& ifs, const Word& w, const RatVec& x);

// Is m (projectively) in PGL_{d+1}(Z[S^-1])? After normalization this means
// the determinant is a nonzero S-unit integer.
bool in_gamma_s(const RatMat& m, const std::set<long>& primes);

struct MembershipReport {
  bool all_members = true;
  bool injective = true;
  std::optional<Word> offending;       // first membership failure
  std::optional<std::pair<Word, Word>> collision;
  long words_checked = 0;
};
// Checks gamma-tilde membership for all words of length <= n and injectivity
// of w -> gamma-tilde_w on length-n words (no exact overlaps at depth n).
MembershipReport lattice_membership_and_freeness(const RationalIfs& ifs, int n);

// Congruence-index bound factor rho_w^{-A} rho_min^{-nL}; (A, L) = (6, 3) on
// the missing-digit fast path, else derived from per-prime norms of the
// generators. The true index is this factor up to an absolute constant.
struct IndexBound {
  double a_const;
  double l_const;
  double factor;
  bool missing_digit_path;
};
IndexBound index_bound(const RationalIfs& ifs, const Word& w, int n);

// |SL_{d+1}(Z/p^nu Z)| exactly.
Int sl_order(int d, long p, long nu);

// Shells: enumerates I_n^d = {n = n_1 >= ... >= n_d >= 0}, evaluates the
// modular character delta_B(a_n) = prod p^{n_i (d+2-2i)} and returns the
// exact sum with the bracket [p^{v(d) n}, |I_n^d| p^{v(d) n}].
struct ShellSum {
  std::vector<Rat> values;
  Rat sum;
  Rat bracket_lo;
  Rat bracket_hi;
  Int tuple_count;
};
ShellSum shell_and_modular(long p, long n, int d);

long v_exponent(int d);  // v(d) = (floor(d/2)+1) ceil(d/2)

}  // namespace fraclab
