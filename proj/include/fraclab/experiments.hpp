#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/ifs.hpp"
#include "fraclab/lattice.hpp"
#include "fraclab/transform.hpp"

namespace fraclab {

// Shared experiment settings. The bracket constants C_F, kappa_*, delta and
// C'_d are existential in the theorems; rows derived from them are
// conditional on the supplied values.
struct ExperimentConfig {
  std::string ifs_spec;
  std::string psi_spec;
  long n_lo = 1, n_hi = 20;
  std::vector<double> ts;
  std::vector<double> eps_list;
  long samples = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  Word basepoint_word;
  int sample_depth = 64;
  double c_f = 1.0;
  double kappa_star = 0.05;
  double delta = 0.05;
  double c_prime_d = 0.0;
  bool lebesgue = false;  // sample x from [0,1)^d instead of the fractal

  void validate() const;
};

// Basepoint x_alpha^u = k_alpha^{-1} g_{-t_alpha} u(b_alpha) Gamma with
// t_alpha = (d/(d+1)) log rho_alpha, as a scaled rational basis with an
// exact unimodularity certificate: basis = rho_alpha^{-1/(d+1)} * mat,
// det(mat) = rho_alpha.
LatticeBasis basepoint_lattice(const RationalIfs& ifs, const Word& alpha);

struct EquidistRow {
  double t;
  double eps;
  double estimate;
  double stderr_;
  double haar_lo;
  double haar_hi;
};

// Monte-Carlo cusp frequencies of g_t u(x) x_alpha against the Haar bracket.
std::vector<EquidistRow> orbit_statistic(const ExperimentConfig& cfg);

// The other built-in test statistic: empirical d_1 quantiles along the flow.
struct D1QuantileRow {
  double t;
  double q50;
  double q90;
  double q99;
};
std::vector<D1QuantileRow> d1_quantile_statistic(const ExperimentConfig& cfg);

struct CorrelationRow {
  double t;
  double s;
  double joint;
  double product;
  double excess;
  double stderr_;
};

// Two-time cusp correlation along the same sample.
CorrelationRow double_correlation(const ExperimentConfig& cfg, double t,
                                  double s, double eps_t, double eps_s);

struct KhintchineRow {
  long n;
  double t_n;
  double r_tn;
  double mu_an_hat;
  double stderr_;
  double bracket_lo;
  double bracket_hi;
  bool in_g0;
  double cum_hit;
  bool psi_normalized;   // psi^d(2^n) <= 2^{-n}
  bool psi_above_floor;  // psi^d(2^n) >= 1/(2^n log^{1.1} 2^n)
};

std::vector<KhintchineRow> khintchine_scan(const ExperimentConfig& cfg);

// Deterministic spherical average of the missing-digit random walk:
// sum_{w in Lambda^n} lambda_w test(a(p^n) u(b_w) x_alpha).
enum class WalkTest { One, D1, CuspIndicator };

struct WalkRow {
  long n;
  double value;
  std::string mode;  // "enumerated" or "sampled"
  std::optional<Rat> exact;  // set when every term is rational
};

WalkRow walk_average(const RationalIfs& ifs, long n, WalkTest test, double eps,
                     const Word& alpha, long sample_cap = 10000000L,
                     long samples = 200000, std::uint64_t seed = 1);

// p^{-m} sum_{0 <= k < p^m} test(a(p^m) u(k p^{-m}) x); every term is an
// exact shortest-vector decision.
WalkRow rational_points_average(long p, long m, WalkTest test, double eps,
                                const RationalIfs& basepoint_ifs,
                                const Word& alpha, long cap = 10000000L);

// Shortest-vector length of g_t u(x) B_alpha in doubles (statistics path).
double translated_shortest_length(const LatticeBasis& base, double t,
                                  const std::vector<double>& x,
                                  const NormSpec& norm);

}  // namespace fraclab
