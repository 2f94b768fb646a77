#pragma once

#include <optional>
#include <vector>

#include "fraclab/matrix.hpp"
#include "fraclab/transform.hpp"

namespace fraclab {

// Norm on R^{d+1}: |(x_1..x_{d+1})| = max{ |(x_1..x_d)|_base, |x_{d+1}| }.
// The exact code path supports the max base norm; the Euclidean option is
// carried for the Haar-bracket constant and double-precision evaluations.
struct NormSpec {
  int d = 1;
  bool euclidean_base = false;

  static NormSpec sup(int d) { return NormSpec{d, false}; }
  static NormSpec euclid(int d) { return NormSpec{d, true}; }

  // Volume of the unit ball of the extended norm in R^{d+1}.
  double unit_ball_volume() const;
  // Exact norm of a rational vector (max base norm only).
  Rat norm_exact(const RatVec& v) const;
  double norm(const std::vector<double>& v) const;
};

// Basis of a lattice in R^{d+1}: columns of `mat` scaled by a positive real
// `scale` (basis = scale * mat). Rational translates of unimodular lattices
// in this project are always of this form with scale^{d+1} * det(mat) = ±1.
struct LatticeBasis {
  RatMat mat;
  double scale = 1.0;

  static LatticeBasis unimodular(const RatMat& m);  // checks |det| = 1
  // Normalizes an arbitrary nonsingular rational matrix to determinant ±1
  // via a scalar: basis = |det|^{-1/(d+1)} * mat.
  static LatticeBasis rescaled(const RatMat& m);
  int dim() const { return mat.rows(); }
  bool unimodular_exact() const;  // scale^{d+1} |det| == 1, checked exactly
};

struct ShortestVector {
  RatVec coeffs;      // integer coordinates (as rationals) of the minimizer
  RatVec vec;         // mat * coeffs (unscaled by `scale`)
  Rat length_unscaled;  // |vec| in the max-extended norm
  double length;      // scale * length_unscaled
  double d1;          // 1 / length
};

// Exact shortest nonzero vector by enumeration with a rigorous coefficient
// bound derived from the inverse basis. Requires d+1 <= 4 (soft cap).
ShortestVector shortest_vector(const LatticeBasis& basis, const NormSpec& norm);

// d_1(basis) = 1 / (length of shortest vector).
double d1_height(const LatticeBasis& basis, const NormSpec& norm);

// Haar-measure bracket for the cusp set C(eps) = {d_1 > 1/eps}:
// [C_d eps^{d+1} - C'_d eps^{2(d+1)}, C_d eps^{d+1}], C_d = c_{d+1}/2 zeta(d+1).
struct HaarBracket {
  double lower;
  double upper;
  double c_d;
};
HaarBracket cusp_haar_bracket(double eps, const NormSpec& norm,
                              double c_prime = 0.0);

// Exact count of primitive lattice vectors in the open centered box
// (-h_1,h_1) x ... x (-h_{d+1},h_{d+1}); basis must have scale 1.
long siegel_count(const RatMat& basis, const RatVec& half_widths);

// Flow/horosphere elements. Exact forms take the multiplier as a rational.
RatMat u_matrix(const RatVec& x);                        // [[Id, x],[0,1]]
RatMat a_matrix_exact(int d, const Rat& t);              // diag(t Id_d, 1)
RatMat g_matrix_exact(int d, const Rat& e_t_over_d);     // diag(e^{t/d} Id, e^{-t})
std::vector<double> g_diag(int d, double t);             // diagonal of g_t

// A_n^*(psi) membership: exists primitive (p, q), 2^{n-1} <= |q| < 2^n,
// |q x - p| < psi(2^n). Returns the witness if one exists.
//
//  - `direct` searches denominators (continued fractions in d = 1,
//    bounded search in d = 2,3);
//  - `lattice` enumerates primitive vectors of g_{t_n} u(x) Z^{d+1} in the
//    box  {|w_1..d| < e^{-r(t_n)}} x {e^{-r(t_n)}/2 <= |w_{d+1}| < e^{-r(t_n)}},
//    generating candidates from the dyadic profile in floating point and
//    certifying each candidate exactly.
// Both modes resolve every inequality in exact arithmetic, so they agree.
enum class AnStarMode { Direct, Lattice };

struct AnStarWitness {
  std::vector<Int> p;
  Int q;
};

std::optional<AnStarWitness> an_star_test(const std::vector<Rat>& x,
                                          const ApproxFunction& psi, long n,
                                          AnStarMode mode);

// Precomputed continued-fraction data for fast repeated A_n^* decisions at
// a fixed x (d = 1). Covers denominators below 2^max_n.
class AnStarScanner {
 public:
  AnStarScanner(const Rat& x, long max_n);
  std::optional<AnStarWitness> test(const ApproxFunction& psi, long n) const;

 private:
  Rat x_;
  long max_n_;
  std::vector<Convergent> conv_;
};

}  // namespace fraclab
