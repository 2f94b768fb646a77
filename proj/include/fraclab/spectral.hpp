#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraclab/ifs.hpp"

namespace fraclab {

// Structural constants of the equidistribution pipeline; everything here is
// an exact rational function of (d, eps).
struct StructuralConstants {
  int d;
  long ell;          // d(d+1)/2
  Rat eps_d;         // 1/2 if d = 1, else 1
  long v_d;          // (floor(d/2)+1) ceil(d/2)
  long p;            // 2 v(d)
  Rat kappa_prime;   // 25/64 if d = 1, else 1/2
  Rat kappa;         // (kappa' - eps) / (2 + 2d + 6 ell + d^2)
  long cap;          // d(d+1), an upper bound kappa must respect
  Rat q_eps;         // 2 theta/(theta+1), theta conjugate to (p+eps)/eps_d
  Rat slack;         // the shared eps knob
};

StructuralConstants structural_constants(int d, const Rat& eps);

// IFS-dependent decay rates (transcendental, carried as doubles):
//   r^{-sigma} = (sum lambda_i^2 rho_i^{-d})^{1/2}
//   r^{o_eps}  = (sum lambda_i^{q_eps})^{1/q_eps}
//   r^{-upsilon} = rho_min^{-L/4} sum lambda_i rho_i^{-ell}
struct RateConstants {
  double sigma;
  double o_eps;
  double upsilon;
  double q_eps;
  double r;       // average contraction ratio
  double l_const; // L from the congruence-index bound
  double a_const; // A from the congruence-index bound
  Rat mass_base;  // sum lambda_i^2 rho_i^{-d}, exact
};

RateConstants rate_constants(const RationalIfs& ifs,
                             const StructuralConstants& sc);

// epsilon_0 = min{1, kappa eps(d) / (d eps(d) + (4 ell + L) p)} and the
// uniform missing-digit dimension threshold s* = 1/(1 + epsilon_0).
struct MainThreshold {
  Rat epsilon0;
  Rat dimension_threshold;
};
MainThreshold threshold_main(const StructuralConstants& sc, const Rat& l_const);

// Theorem hypotheses: the spectral-gap inequality 2 sigma (o+u)/(o+sigma) < kappa
// and the thickness inequality against epsilon_0.
struct GapHypothesis {
  bool gap_holds;
  double gap_lhs;
  double gap_kappa;
  double gap_margin;
  bool thickness_holds;
  double thickness_lhs;
  double epsilon0;
};
GapHypothesis gap_hypothesis(const RationalIfs& ifs, const StructuralConstants& sc);

// Exact off-diagonal Cantor sum  sum_{eta != omega in Lambda^n}
// lambda_eta lambda_omega p^{-delta d(eta,omega)} for the uniform
// missing-digit IFS, via the closed form
//   p^{-2sn} sum_{j=1}^n p^{-delta j} |Lambda|^{n+j-1} (|Lambda|-1).
struct CantorGapSum {
  Rat closed_form;
  std::optional<Rat> brute_force;  // set when verification ran
  bool verified;                   // closed == brute when both present
};
CantorGapSum cantor_gap_sum(long p, long alphabet, long n, long delta,
                            bool brute_force,
                            double pair_cap = 1e8);

// Cutoff package for the equal-ratio sharpening:
//  - delta_eps = 25/32 - 2 eps (operator decay exponent),
//  - dimension cutoff solving (1-s)(o+3/2) = 2 kappa o at
//    o = (25/32 - eps)/2, kappa = 25/64 (exact rational),
//  - given a rational-points rate sigma' > 0 and Sobolev order ell:
//    eps_bq = (o' - sqrt(o'^2 - 4 sigma'))/2 with o' = 3 ell + 2 + sigma',
//    and rho_0 = (1/2 - eps_bq) eps_bq / (1 - eps_bq).
struct CantorCutoffs {
  Rat delta_eps;
  Rat dimension_cutoff;
};
CantorCutoffs cantor_cutoffs(const Rat& eps);

struct BqRate {
  double eps;
  double rho0;
};
BqRate bq_rate(double sigma_prime, long ell);

// Computable factor (sum lambda_i^{q_eps})^{2k/q_eps} of the general-IFS
// operator-norm bound. The remaining matrix-coefficient norm is finite but
// never evaluated; `constant_evaluated` marks that honestly.
struct SpectralBoundFactor {
  double factor;
  bool constant_evaluated;  // always false: the paper proves finiteness only
};
SpectralBoundFactor spectral_bound_factor(const RationalIfs& ifs,
                                          const StructuralConstants& sc, long k);

// The (n, m) schedule balancing the error terms at time t = r^{-tau}:
//   n = floor(kappa tau / 2(o+u)),
//   m = floor((tau + (o-1) n) / (1+sigma)),
// and the decay exponent delta; delta > 0 iff the gap hypothesis holds.
struct BalancingSchedule {
  long n;
  long m;
  double delta;
  bool hypothesis_ok;
};
BalancingSchedule balancing_schedule(const RateConstants& rc, double kappa,
                                     double t);

}  // namespace fraclab
