#include "fraclab/spectral.hpp"

#include <cmath>

#include "fraclab/sarith.hpp"

namespace fraclab {

StructuralConstants structural_constants(int d, const Rat& eps) {
  if (d < 1) throw DomainError("d must be >= 1");
  StructuralConstants sc;
  sc.d = d;
  sc.ell = long(d) * (d + 1) / 2;
  sc.eps_d = d == 1 ? Rat(1, 2) : Rat(1);
  sc.v_d = v_exponent(d);
  sc.p = 2 * sc.v_d;
  sc.kappa_prime = d == 1 ? Rat(25, 64) : Rat(1, 2);
  // eps = 0 is accepted as the formal limit of the constant pipeline.
  if (eps < 0 || eps >= sc.kappa_prime)
    throw DomainError("eps must lie in [0, kappa')");
  sc.kappa = (sc.kappa_prime - eps) / Rat(2 + 2 * d + 6 * sc.ell + d * d);
  sc.cap = long(d) * (d + 1);
  if (sc.kappa > sc.cap) throw std::logic_error("kappa exceeds d(d+1)");
  // theta conjugate to p_eps = (p+eps)/eps_d; q = 2 theta/(theta+1)
  // simplifies to 2 p_eps / (2 p_eps - 1).
  Rat p_eps = (Rat(sc.p) + eps) / sc.eps_d;
  sc.q_eps = 2 * p_eps / (2 * p_eps - 1);
  if (sc.q_eps <= 1 || sc.q_eps >= 2)
    throw std::logic_error("q_eps out of (1,2)");
  sc.slack = eps;
  return sc;
}

RateConstants rate_constants(const RationalIfs& ifs,
                             const StructuralConstants& sc) {
  if (ifs.alphabet_size() < 2)
    throw DomainError("rate constants need at least two maps");
  RateConstants rc;
  Rat r = ifs.average_contraction();
  rc.r = to_d(r);
  double log_inv_r = -std::log(rc.r);
  if (!(log_inv_r > 0)) throw DomainError("degenerate average contraction");

  Rat mass(0);
  for (int i = 0; i < ifs.alphabet_size(); ++i)
    mass += ifs.lambda(i) * ifs.lambda(i) * pow_rat(ifs.map(i).rho, -sc.d);
  rc.mass_base = mass;
  // r^{-sigma} = mass^{1/2}
  rc.sigma = 0.5 * std::log(to_d(mass)) / log_inv_r;

  rc.q_eps = to_d(sc.q_eps);
  double sum_q = 0;
  for (int i = 0; i < ifs.alphabet_size(); ++i)
    sum_q += std::pow(to_d(ifs.lambda(i)), rc.q_eps);
  // r^{o} = (sum lambda^q)^{1/q}  =>  o = log(sum)/ (q log r)
  rc.o_eps = std::log(sum_q) / (rc.q_eps * std::log(rc.r));

  IndexBound ib = index_bound(ifs, {}, 0);
  rc.l_const = ib.l_const;
  rc.a_const = ib.a_const;
  double sum_ell = 0;
  for (int i = 0; i < ifs.alphabet_size(); ++i)
    sum_ell += to_d(ifs.lambda(i)) * std::pow(to_d(ifs.map(i).rho), -double(sc.ell));
  rc.upsilon = (0.25 * rc.l_const * (-std::log(to_d(ifs.rho_min()))) +
                std::log(sum_ell)) / log_inv_r;
  return rc;
}

MainThreshold threshold_main(const StructuralConstants& sc, const Rat& l_const) {
  if (l_const <= 0) throw DomainError("L must be positive");
  MainThreshold mt;
  Rat denom = Rat(sc.d) * sc.eps_d + (Rat(4 * sc.ell) + l_const) * Rat(sc.p);
  Rat e0 = sc.kappa * sc.eps_d / denom;
  mt.epsilon0 = std::min(Rat(1), e0);
  mt.dimension_threshold = Rat(1) / (Rat(1) + mt.epsilon0);
  return mt;
}

GapHypothesis gap_hypothesis(const RationalIfs& ifs,
                             const StructuralConstants& sc) {
  GapHypothesis gh;
  RateConstants rc = rate_constants(ifs, sc);
  gh.gap_lhs = 2.0 * rc.sigma * (rc.o_eps + rc.upsilon) / (rc.o_eps + rc.sigma);
  gh.gap_kappa = to_d(sc.kappa);
  gh.gap_margin = gh.gap_kappa - gh.gap_lhs;
  gh.gap_holds = gh.gap_lhs < gh.gap_kappa;

  double lr_min = std::log(to_d(ifs.rho_min()));
  double lr_max = std::log(to_d(ifs.rho_max()));
  double ll_min = std::log(to_d(ifs.lambda_min()));
  double ll_max = std::log(to_d(ifs.lambda_max()));
  double s = ifs.moran_dimension();
  gh.thickness_lhs =
      (double(sc.d) * lr_min / ll_max - 1.0) * ll_min / (s * lr_max);
  Rat l_rat = ifs.is_missing_digit()
                  ? Rat(3)
                  : make_rat(long(std::llround(rc.l_const * 1000000)), 1000000L);
  MainThreshold mt = threshold_main(sc, l_rat);
  gh.epsilon0 = to_d(mt.epsilon0);
  gh.thickness_holds = gh.thickness_lhs < gh.epsilon0;
  return gh;
}

CantorGapSum cantor_gap_sum(long p, long alphabet, long n, long delta,
                            bool brute_force, double pair_cap) {
  if (!is_prime(p)) throw DomainError("p must be prime");
  if (alphabet < 2 || alphabet > p) throw DomainError("need 2 <= |Lambda| <= p");
  if (n < 1) throw DomainError("n must be >= 1");
  if (delta < 0) throw DomainError("delta must be >= 0");
  CantorGapSum out;
  // p^{-2sn} = |Lambda|^{-2n} since p^s = |Lambda| for uniform weights.
  Rat lead = pow_rat(Rat(1, alphabet), 2 * n);
  Rat sum(0);
  for (long j = 1; j <= n; ++j)
    sum += pow_rat(Rat(1, p), delta * j) * pow_rat(Rat(alphabet), n + j - 1) *
           Rat(alphabet - 1);
  out.closed_form = lead * sum;
  out.verified = false;
  if (brute_force) {
    double pairs = std::pow(double(alphabet), 2.0 * double(n));
    if (pairs > pair_cap) {
      out.brute_force = std::nullopt;  // flagged: closed form only
      return out;
    }
    // Enumerate ordered pairs of words, accumulate exactly.
    long total = 1;
    for (long i = 0; i < n; ++i) total *= alphabet;
    Rat lambda_pair = pow_rat(Rat(1, alphabet), 2 * n);
    Rat acc(0);
    std::vector<long> a(n), b(n);
    for (long ia = 0; ia < total; ++ia) {
      long ta = ia;
      for (long i = 0; i < n; ++i) { a[i] = ta % alphabet; ta /= alphabet; }
      for (long ib = 0; ib < total; ++ib) {
        if (ia == ib) continue;
        long tb = ib;
        for (long i = 0; i < n; ++i) { b[i] = tb % alphabet; tb /= alphabet; }
        long dmax = 0;
        for (long i = 0; i < n; ++i)
          if (a[i] != b[i]) dmax = i + 1;
        acc += lambda_pair * pow_rat(Rat(1, p), delta * dmax);
      }
    }
    out.brute_force = acc;
    out.verified = acc == out.closed_form;
  }
  return out;
}

CantorCutoffs cantor_cutoffs(const Rat& eps) {
  if (eps < 0 || eps >= Rat(25, 64)) throw DomainError("eps out of range");
  CantorCutoffs out;
  out.delta_eps = Rat(25, 32) - 2 * eps;
  // (1-s)(o + 3/2) = 2 kappa o with o = (25/32 - eps)/2, kappa = 25/64.
  Rat o = (Rat(25, 32) - eps) / 2;
  Rat kappa(25, 64);
  out.dimension_cutoff = Rat(1) - 2 * kappa * o / (o + Rat(3, 2));
  return out;
}

BqRate bq_rate(double sigma_prime, long ell) {
  if (sigma_prime <= 0) throw DomainError("sigma' must be positive");
  double o = 3.0 * double(ell) + 2.0 + sigma_prime;
  double disc = o * o - 4.0 * sigma_prime;
  if (disc < 0) throw DomainError("discriminant negative");
  BqRate out;
  out.eps = (o - std::sqrt(disc)) / 2.0;
  out.rho0 = (0.5 - out.eps) * out.eps / (1.0 - out.eps);
  return out;
}

SpectralBoundFactor spectral_bound_factor(const RationalIfs& ifs,
                                          const StructuralConstants& sc,
                                          long k) {
  if (k < 0) throw DomainError("k must be >= 0");
  double q = to_d(sc.q_eps);
  double sum = 0;
  for (int i = 0; i < ifs.alphabet_size(); ++i)
    sum += std::pow(to_d(ifs.lambda(i)), q);
  SpectralBoundFactor out;
  out.factor = std::pow(sum, 2.0 * double(k) / q);
  out.constant_evaluated = false;
  return out;
}

BalancingSchedule balancing_schedule(const RateConstants& rc, double kappa,
                                     double t) {
  if (t <= 1) throw DomainError("balancing needs t > 1");
  BalancingSchedule bs;
  double tau = std::log(t) / (-std::log(rc.r));
  double o = rc.o_eps, u = rc.upsilon, s = rc.sigma;
  double half = kappa / (2.0 * (o + u));
  bs.n = static_cast<long>(std::floor(half * tau));
  bs.m = static_cast<long>(
      std::floor((tau + (o - 1.0) * double(bs.n)) / (1.0 + s)));
  bs.delta = half + (1.0 + (o - 1.0) * half) / (1.0 + s) - 1.0;
  bs.hypothesis_ok = bs.delta > 0;
  return bs;
}

}  // namespace fraclab
