#include "fraclab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fraclab/kv.hpp"

namespace fraclab {

ApproxFunction ApproxFunction::power(int dim, const Rat& exponent) {
  if (exponent <= 0) throw DomainError("power psi needs a positive exponent");
  ApproxFunction f;
  f.kind_ = Kind::Power;
  f.dim_ = dim;
  f.exponent_ = exponent;
  return f;
}

ApproxFunction ApproxFunction::power_tau(int dim, const Rat& tau) {
  return power(dim, tau + Rat(1, dim));
}

ApproxFunction ApproxFunction::reciprocal(int dim) {
  ApproxFunction f;
  f.kind_ = Kind::Reciprocal;
  f.dim_ = dim;
  f.exponent_ = 1;
  return f;
}

ApproxFunction ApproxFunction::log_power(int dim, double a) {
  if (a <= 0) throw DomainError("log psi needs a > 0");
  ApproxFunction f;
  f.kind_ = Kind::LogPower;
  f.dim_ = dim;
  f.log_a_ = a;
  return f;
}

ApproxFunction ApproxFunction::table(
    int dim, std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2) throw DomainError("table psi needs at least two points");
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].second <= 0) throw DomainError("table psi must be positive");
    if (i && pts[i].first == pts[i - 1].first)
      throw DomainError("table psi has duplicate abscissa");
  }
  ApproxFunction f;
  f.kind_ = Kind::Table;
  f.dim_ = dim;
  f.table_ = std::move(pts);
  return f;
}

ApproxFunction ApproxFunction::table_from_file(int dim, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open psi table: " + path);
  std::vector<std::pair<double, double>> pts;
  double q, v;
  while (in >> q >> v) pts.emplace_back(q, v);
  return table(dim, std::move(pts));
}

ApproxFunction ApproxFunction::from_spec_string(int dim, const std::string& spec) {
  if (spec == "recip" || spec == "1/q") return reciprocal(dim);
  if (spec.rfind("power:tau=", 0) == 0)
    return power_tau(dim, parse_rat(spec.substr(10)));
  if (spec.rfind("power:e=", 0) == 0)
    return power(dim, parse_rat(spec.substr(8)));
  if (spec.rfind("log:a=", 0) == 0)
    return log_power(dim, std::stod(spec.substr(6)));
  if (spec.rfind("table:", 0) == 0) return table_from_file(dim, spec.substr(6));
  throw DomainError("unknown psi spec: " + spec);
}

std::string ApproxFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Power: os << "q^-" << rat_str(exponent_); break;
    case Kind::Reciprocal: os << "1/q"; break;
    case Kind::LogPower: os << "1/(q ln^" << log_a_ << " q)"; break;
    case Kind::Table: os << "table[" << table_.size() << "]"; break;
  }
  return os.str();
}

double ApproxFunction::eval(double q) const {
  if (q < 1) throw DomainError("psi domain is [1,inf)");
  switch (kind_) {
    case Kind::Power:
      return std::pow(q, -to_d(exponent_));
    case Kind::Reciprocal:
      return 1.0 / q;
    case Kind::LogPower: {
      // Decreasing only past q = e; constant extension to the left.
      double qe = std::max(q, std::exp(1.0));
      return 1.0 / (qe * std::pow(std::log(qe), log_a_));
    }
    case Kind::Table: {
      if (q <= table_.front().first) return table_.front().second;
      if (q >= table_.back().first) return table_.back().second;
      auto it = std::lower_bound(
          table_.begin(), table_.end(), std::make_pair(q, 0.0));
      auto hi = it;
      auto lo = it - 1;
      double w = (q - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  throw std::logic_error("unreachable");
}

bool ApproxFunction::dyadic_exact() const {
  return kind_ == Kind::Power || kind_ == Kind::Reciprocal;
}

int ApproxFunction::compare_dyadic(const Rat& r, long n) const {
  if (!dyadic_exact()) throw DomainError("psi has no exact dyadic values");
  if (r <= 0) throw DomainError("compare_dyadic needs r > 0");
  // r vs 2^{-e n}, e = a/b > 0: equivalent to r^b * 2^{a n} vs 1.
  long a = exponent_.get_num().get_si();
  long b = exponent_.get_den().get_si();
  Rat lhs = pow_rat(r, b) * pow_rat(Rat(2), a * n);
  if (lhs < 1) return -1;
  if (lhs > 1) return 1;
  return 0;
}

std::optional<Rat> ApproxFunction::dyadic_value(long n) const {
  if (!dyadic_exact()) return std::nullopt;
  if (exponent_.get_den() != 1) return std::nullopt;
  return pow_rat(Rat(1, 2), exponent_.get_num().get_si() * n);
}

bool ApproxFunction::is_nonincreasing_on(const std::vector<double>& grid) const {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] > grid[i - 1] && eval(grid[i]) > eval(grid[i - 1]) + 1e-15)
      return false;
  return true;
}

DynamicalProfile dyadic_profile(const ApproxFunction& psi, long n) {
  if (n < 1) throw DomainError("dyadic_profile: n must be >= 1");
  int d = psi.dim();
  double q = std::ldexp(1.0, static_cast<int>(n));
  double v = psi.eval(q);
  if (!(v > 0) || v < 1e-300)
    throw DomainError("psi(2^n) underflows or is not positive");
  double prod = q * std::pow(v, d);  // 2^n psi^d(2^n)
  DynamicalProfile p;
  p.r = -std::log(prod) / double(d + 1);
  p.lam = double(n) * std::log(2.0);
  p.t = p.lam + p.r;
  p.L = p.t + d * p.r;
  return p;
}

double t_threshold(const ApproxFunction& psi) {
  int d = psi.dim();
  double p1 = psi.eval(1.0);
  if (!(p1 > 0) || p1 < 1e-300) throw DomainError("psi(1) out of range");
  return -(double(d) / double(d + 1)) * std::log(p1);
}

double r_of_t(const ApproxFunction& psi, double t) {
  int d = psi.dim();
  double t0 = t_threshold(psi);
  if (t < t0 - 1e-12) throw DomainError("r_of_t: t below threshold t0");
  // F(r) = psi^d(e^{t-r}) e^{t + d r} - 1 is non-decreasing; bracket per the
  // endpoint signs: F(-t/d - log psi(1)) <= 0 <= F(t).
  double lo = -t / double(d) - std::log(psi.eval(1.0));
  double hi = t;
  auto value = [&](double r) {
    double lam = t - r;
    double q = std::exp(std::max(lam, 0.0));
    return d * std::log(psi.eval(q)) + t + d * r;
  };
  if (value(hi) < 0) return hi;  // only at the t0 boundary
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    if (value(mid) >= 0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

GrowthReport growth_checks(const ApproxFunction& psi,
                           const std::vector<double>& ts, long max_dyadic_n) {
  GrowthReport rep;
  int d = psi.dim();
  const double tol = 1e-8;
  // A non-monotone input invalidates the transform; detect it directly on a
  // geometric grid before checking the derived bounds.
  {
    std::vector<double> grid;
    for (double q = 1.0; q <= 1e9; q *= 1.31) grid.push_back(q);
    if (!psi.is_nonincreasing_on(grid)) {
      rep.ok = false;
      rep.violation = "psi is not non-increasing on [1,inf)";
      return rep;
    }
  }
  std::vector<std::pair<double, double>> tr;
  for (double t : ts) tr.emplace_back(t, r_of_t(psi, t));
  std::sort(tr.begin(), tr.end());
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    for (std::size_t j = i + 1; j < tr.size(); ++j) {
      double dt = tr[j].first - tr[i].first;
      double dr = tr[j].second - tr[i].second;
      double m1 = dr + dt / d;  // r weak monotonicity slack
      double lam1 = tr[i].first - tr[i].second;
      double lam2 = tr[j].first - tr[j].second;
      double m2 = (double(d + 1) / d) * dt - (lam2 - lam1);  // lambda growth
      rep.worst_margin = std::min(rep.worst_margin, std::min(m1, m2));
      if (m1 < -tol || m2 < -tol) {
        rep.ok = false;
        if (rep.violation.empty()) {
          std::ostringstream os;
          os << "pair t1=" << tr[i].first << " t2=" << tr[j].first
             << (m1 < -tol ? " violates r weak monotonicity"
                           : " violates lambda growth bound");
          rep.violation = os.str();
        }
      }
    }
  }
  if (max_dyadic_n > 0) {
    double t0 = t_threshold(psi);
    for (long n = 1; n <= max_dyadic_n; ++n) {
      DynamicalProfile p = dyadic_profile(psi, n);
      double slack = p.t - (t0 + double(n) * d * std::log(2.0) / (d + 1));
      rep.worst_margin = std::min(rep.worst_margin, slack);
      if (slack < -tol) {
        rep.ok = false;
        if (rep.violation.empty())
          rep.violation = "dyadic time t_" + std::to_string(n) +
                          " below the growth lower bound";
      }
    }
  }
  return rep;
}

std::vector<Convergent> convergents(const Rat& x, const Int& q_limit) {
  std::vector<Convergent> out;
  // h_i = a_i h_{i-1} + h_{i-2}, same for k, seeded at (1,0) and (0,1).
  Int h_prev(1), h_prev2(0);
  Int k_prev(0), k_prev2(1);
  Rat rem = x;
  for (int guard = 0; guard < 100000; ++guard) {
    Int a;
    mpz_fdiv_q(a.get_mpz_t(), rem.get_num().get_mpz_t(),
               rem.get_den().get_mpz_t());
    Int h = a * h_prev + h_prev2;
    Int k = a * k_prev + k_prev2;
    if (k > q_limit) break;
    out.push_back({h, k});
    h_prev2 = h_prev; h_prev = h;
    k_prev2 = k_prev; k_prev = k;
    Rat frac = rem - Rat(a);
    if (frac == 0) break;
    rem = Rat(1) / frac;
  }
  return out;
}

DirichletWitness dirichlet_witness(const std::vector<Rat>& x, long n) {
  if (n < 1) throw DomainError("dirichlet_witness: n must be >= 1");
  int d = static_cast<int>(x.size());
  if (d < 1 || d > 3) throw DomainError("dirichlet_witness: dimension 1..3 only");
  Int q_limit = pow_int(2, static_cast<unsigned long>(n));

  auto error_at = [&](const Int& q, std::vector<Int>* p_out) {
    double err = 0;
    for (const auto& xi : x) {
      Rat qx = xi * Rat(q);
      // nearest integer
      Int pi;
      Int num = qx.get_num(), den = qx.get_den();
      Int twice = 2 * num + den;
      mpz_fdiv_q(pi.get_mpz_t(), twice.get_mpz_t(), Int(2 * den).get_mpz_t());
      if (p_out) p_out->push_back(pi);
      err = std::max(err, std::abs(to_d(qx - Rat(pi))));
    }
    return err;
  };

  double target = std::pow(2.0, -double(n) / d);
  if (d == 1) {
    // Exact zero for rationals with small denominator.
    if (x[0].get_den() <= q_limit) {
      Int q = x[0].get_den();
      Int p = x[0].get_num();
      return {{p}, q, 0.0};
    }
    auto cs = convergents(x[0], q_limit);
    if (cs.empty()) throw std::logic_error("no convergent below limit");
    const auto& last = cs.back();
    double err = std::abs(to_d(x[0] * Rat(last.q) - Rat(last.p)));
    return {{last.p}, last.q, err};
  }
  // Bounded search; Dirichlet guarantees a witness exists.
  for (Int q(1); q <= q_limit; ++q) {
    std::vector<Int> p;
    double err = error_at(q, &p);
    if (err <= target + 1e-15) return {p, q, err};
  }
  throw std::logic_error("dirichlet witness not found (should not happen)");
}

CondensationReport condensation_check(const ApproxFunction& psi, long N) {
  int d = psi.dim();
  CondensationReport rep{};
  double series = 0;
  for (long q = 1; q <= N; ++q) series += std::pow(psi.eval(double(q)), d);
  double dyadic = 0;
  for (long k = 0; (1L << k) <= N; ++k)
    dyadic += double(1L << k) * std::pow(psi.eval(double(1L << k)), d);
  rep.series_partial = series;
  rep.dyadic_partial = dyadic;
  // For non-increasing psi: sum_{q<=2^m} >= (1/2) sum_{k<=m} 2^k psi^d(2^k)
  // and sum_{q<=N} <= psi^d(1) + sum dyadic terms.
  rep.lower_ok = series >= 0.5 * dyadic - 1e-9;
  rep.upper_ok = series <= std::pow(psi.eval(1.0), d) + dyadic + 1e-9;
  return rep;
}

}  // namespace fraclab
