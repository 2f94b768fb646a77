#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/rat.hpp"

namespace fraclab {

// Non-increasing positive approximation function on [1, infinity).
//
// Built-ins: power law q^{-e}, 1/q, 1/(q ln^a q) and tabulated values with
// linear interpolation. The log-power family is only decreasing for q >= e;
// we extend it (and tables starting past q = 1) constantly to the left.
class ApproxFunction {
 public:
  enum class Kind { Power, Reciprocal, LogPower, Table };

  static ApproxFunction power(int dim, const Rat& exponent);
  // psi_tau(q) = q^{-tau - 1/d}.
  static ApproxFunction power_tau(int dim, const Rat& tau);
  static ApproxFunction reciprocal(int dim);
  static ApproxFunction log_power(int dim, double a);
  static ApproxFunction table(int dim, std::vector<std::pair<double, double>> pts);
  static ApproxFunction table_from_file(int dim, const std::string& path);
  // CLI syntax: power:tau=<v> | recip | log:a=<v> | table:<file>.
  static ApproxFunction from_spec_string(int dim, const std::string& spec);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  std::string describe() const;

  double eval(double q) const;

  // True when psi(2^n) = 2^{-e n} for an exact rational exponent e; then
  // comparisons r <=> psi(2^n) are decidable exactly.
  bool dyadic_exact() const;
  const Rat& exponent() const { return exponent_; }
  // Sign of r - psi(2^n); requires dyadic_exact() and r > 0.
  int compare_dyadic(const Rat& r, long n) const;
  // psi(2^n) as an exact rational if the value itself is rational.
  std::optional<Rat> dyadic_value(long n) const;

  // Monotonicity scan on a grid (used to reject bad tables).
  bool is_nonincreasing_on(const std::vector<double>& grid) const;

 private:
  Kind kind_ = Kind::Reciprocal;
  int dim_ = 1;
  Rat exponent_;  // Power: psi(q) = q^{-exponent_}
  double log_a_ = 1.0;
  std::vector<std::pair<double, double>> table_;
};

// r(t), lambda(t) = t - r(t), L(t) = t + d r(t) at a single time, in log
// units, with psi^d(e^lambda) = e^{-L}.
struct DynamicalProfile {
  double t;
  double r;
  double lam;
  double L;
};

// Profile at the dyadic time t_n defined by lambda(t_n) = n log 2:
// r(t_n) = -log(2^n psi^d(2^n)) / (d+1).
DynamicalProfile dyadic_profile(const ApproxFunction& psi, long n);

// t0 = -(d/(d+1)) log psi(1); domain threshold for r_of_t.
double t_threshold(const ApproxFunction& psi);

// Solves psi^d(e^{t-r}) = e^{-t-dr} for r by bisection (tolerance 1e-10).
double r_of_t(const ApproxFunction& psi, double t);

struct GrowthReport {
  bool ok = true;
  std::string violation;   // description of the first offending pair
  double worst_margin = 0; // most negative slack seen
};

// Checks r weak monotonicity, the lambda growth bound and the dyadic-time
// lower bound t_n >= t0 + n d log2/(d+1) on the given times.
GrowthReport growth_checks(const ApproxFunction& psi,
                           const std::vector<double>& ts,
                           long max_dyadic_n = 0);

// Dirichlet witness: q <= 2^n with |q x - p|_inf <= 2^{-n/d}.
struct DirichletWitness {
  std::vector<Int> p;
  Int q;
  double error;
};
DirichletWitness dirichlet_witness(const std::vector<Rat>& x, long n);

// Continued-fraction convergents of a rational x (terminating).
struct Convergent {
  Int p;
  Int q;
};
std::vector<Convergent> convergents(const Rat& x, const Int& q_limit);

// Condensation cross-check: partial sums of sum psi^d(q) against the dyadic
// series sum 2^n psi^d(2^n), with the classical two-sided inequality.
struct CondensationReport {
  double series_partial;   // sum_{q<=N} psi^d(q)
  double dyadic_partial;   // sum_{2^k<=N} 2^k psi^d(2^k)
  bool lower_ok;           // dyadic/2 <= series
  bool upper_ok;           // series <= psi^d(1) + dyadic
};
CondensationReport condensation_check(const ApproxFunction& psi, long N);

}  // namespace fraclab
