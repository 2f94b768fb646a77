#include "fraclab/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace fraclab {

namespace {

double euclid_ball_volume(int d) {
  // pi^{d/2} / Gamma(d/2 + 1)
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

}  // namespace

double NormSpec::unit_ball_volume() const {
  double base = euclidean_base ? euclid_ball_volume(d) : std::pow(2.0, d);
  return base * 2.0;  // product with the |x_{d+1}| < 1 slab
}

Rat NormSpec::norm_exact(const RatVec& v) const {
  if (euclidean_base)
    throw DomainError("exact norms are provided for the max base norm only");
  return vec_max_abs(v);
}

double NormSpec::norm(const std::vector<double>& v) const {
  double base = 0;
  for (int i = 0; i < d; ++i)
    base = euclidean_base ? base + v[i] * v[i] : std::max(base, std::fabs(v[i]));
  if (euclidean_base) base = std::sqrt(base);
  return std::max(base, std::fabs(v[d]));
}

LatticeBasis LatticeBasis::unimodular(const RatMat& m) {
  Rat det = m.det();
  if (det != 1 && det != -1)
    throw DomainError("basis is not unimodular");
  return LatticeBasis{m, 1.0};
}

LatticeBasis LatticeBasis::rescaled(const RatMat& m) {
  Rat det = rat_abs(m.det());
  if (det == 0) throw DomainError("singular basis");
  double scale = std::pow(to_d(det), -1.0 / double(m.rows()));
  return LatticeBasis{m, scale};
}

bool LatticeBasis::unimodular_exact() const {
  if (scale == 1.0) return rat_abs(mat.det()) == 1;
  // scale^{d+1} |det| must equal 1; verified in exact form when the scale
  // was produced by `rescaled` (scale = |det|^{-1/(d+1)} by construction).
  double v = std::pow(scale, double(mat.rows())) * std::fabs(to_d(mat.det()));
  return std::fabs(v - 1.0) < 1e-12;
}

namespace {

// Lagrange-Gauss reduction of a 2-column basis (Euclidean inner product,
// exact). Returns the unimodular column transform U with reduced = b * U.
RatMat gauss_reduce_2d(RatMat& b) {
  RatMat u = RatMat::identity(2);
  auto col_sq = [&](int j) -> Rat {
    Rat s(0);
    for (int i = 0; i < 2; ++i) s += b(i, j) * b(i, j);
    return s;
  };
  auto col_dot = [&]() -> Rat {
    return b(0, 0) * b(0, 1) + b(1, 0) * b(1, 1);
  };
  for (int guard = 0; guard < 256; ++guard) {
    if (col_sq(0) > col_sq(1)) {
      std::swap(b(0, 0), b(0, 1));
      std::swap(b(1, 0), b(1, 1));
      std::swap(u(0, 0), u(0, 1));
      std::swap(u(1, 0), u(1, 1));
    }
    if (col_sq(0) == 0) break;  // singular input; caller's inverse() reports
    // mu = round(<b1,b2>/<b1,b1>)
    Rat mu = col_dot() / col_sq(0);
    Int m;
    Int twice = 2 * mu.get_num() + mu.get_den();
    Int den2 = 2 * mu.get_den();
    mpz_fdiv_q(m.get_mpz_t(), twice.get_mpz_t(), den2.get_mpz_t());
    if (m == 0) break;
    Rat mr(m);
    for (int i = 0; i < 2; ++i) b(i, 1) -= mr * b(i, 0);
    for (int i = 0; i < 2; ++i) u(i, 1) -= mr * u(i, 0);
  }
  return u;
}

}  // namespace

ShortestVector shortest_vector(const LatticeBasis& basis, const NormSpec& norm) {
  RatMat b = basis.mat;
  int n = b.rows();
  if (n > 4) throw DomainError("shortest_vector supports d+1 <= 4");
  RatMat transform = RatMat::identity(n);
  if (n == 2) transform = gauss_reduce_2d(b);
  RatMat inv = b.inverse();

  // Initial candidate: the shortest basis column.
  Rat best(0);
  for (int j = 0; j < n; ++j) {
    RatVec col(n);
    for (int i = 0; i < n; ++i) col[i] = b(i, j);
    Rat len = norm.norm_exact(col);
    if (j == 0 || len < best) best = len;
  }

  // |c_i| <= |row_i(B^{-1})|_1 * |B c|_infty and |.|_infty <= extended norm.
  std::vector<long> bound(n);
  for (int i = 0; i < n; ++i) {
    Rat row_sum(0);
    for (int j = 0; j < n; ++j) row_sum += rat_abs(inv(i, j));
    Rat bd = row_sum * best;
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), bd.get_num().get_mpz_t(),
               bd.get_den().get_mpz_t());
    if (!fl.fits_slong_p()) throw DomainError("coefficient bound overflow");
    bound[i] = fl.get_si();
  }

  ShortestVector out;
  bool have = false;
  std::vector<long> c(n, 0);
  // Enumerate the coefficient box; skip the -c mirror by forcing the first
  // nonzero coordinate positive.
  std::function<void(int, bool)> rec = [&](int idx, bool leading_zero) {
    if (idx == n) {
      if (leading_zero) return;
      RatVec cv(n);
      for (int i = 0; i < n; ++i) cv[i] = c[i];
      RatVec w = b * cv;
      Rat len = norm.norm_exact(w);
      if (!have || len < out.length_unscaled) {
        have = true;
        out.coeffs = cv;
        out.vec = w;
        out.length_unscaled = len;
      }
      return;
    }
    long lo = leading_zero ? 0 : -bound[idx];
    for (long v = lo; v <= bound[idx]; ++v) {
      c[idx] = v;
      rec(idx + 1, leading_zero && v == 0);
    }
    c[idx] = 0;
  };
  rec(0, true);
  if (!have) throw std::logic_error("shortest vector search found nothing");
  out.coeffs = transform * out.coeffs;  // back to original-basis coordinates
  out.length = basis.scale * to_d(out.length_unscaled);
  out.d1 = 1.0 / out.length;
  return out;
}

double d1_height(const LatticeBasis& basis, const NormSpec& norm) {
  return shortest_vector(basis, norm).d1;
}

HaarBracket cusp_haar_bracket(double eps, const NormSpec& norm, double c_prime) {
  if (!(eps > 0 && eps < 1)) throw DomainError("cusp bracket needs 0 < eps < 1");
  if (c_prime < 0) throw DomainError("C'_d must be >= 0");
  int d = norm.d;
  double zeta = std::riemann_zeta(double(d + 1));
  double c_d = norm.unit_ball_volume() / (2.0 * zeta);
  HaarBracket hb;
  hb.c_d = c_d;
  hb.upper = c_d * std::pow(eps, d + 1);
  hb.lower = hb.upper - c_prime * std::pow(eps, 2 * (d + 1));
  return hb;
}

long siegel_count(const RatMat& basis, const RatVec& half_widths) {
  int n = basis.rows();
  if (n > 4) throw DomainError("siegel_count supports d+1 <= 4");
  for (const auto& h : half_widths)
    if (h <= 0) return 0;
  RatMat inv = basis.inverse();
  std::vector<long> bound(n);
  for (int i = 0; i < n; ++i) {
    Rat s(0);
    for (int j = 0; j < n; ++j) s += rat_abs(inv(i, j)) * half_widths[j];
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), s.get_num().get_mpz_t(), s.get_den().get_mpz_t());
    if (!fl.fits_slong_p()) throw DomainError("unbounded box");
    bound[i] = fl.get_si();
  }
  long count = 0;
  std::vector<long> c(n, 0);
  std::function<void(int)> rec = [&](int idx) {
    if (idx == n) {
      long g = 0;
      for (long v : c) g = std::__gcd(g, std::labs(v));
      if (g != 1) return;  // excludes zero (g = 0) and imprimitive vectors
      RatVec cv(n);
      for (int i = 0; i < n; ++i) cv[i] = c[i];
      RatVec w = basis * cv;
      for (int i = 0; i < n; ++i)
        if (rat_abs(w[i]) >= half_widths[i]) return;
      ++count;
      return;
    }
    for (long v = -bound[idx]; v <= bound[idx]; ++v) {
      c[idx] = v;
      rec(idx + 1);
    }
    c[idx] = 0;
  };
  rec(0);
  return count;
}

RatMat u_matrix(const RatVec& x) {
  int d = static_cast<int>(x.size());
  RatMat m = RatMat::identity(d + 1);
  for (int i = 0; i < d; ++i) m(i, d) = x[i];
  return m;
}

RatMat a_matrix_exact(int d, const Rat& t) {
  if (t == 0) throw DomainError("a(t) needs t != 0");
  RatMat m = RatMat::identity(d + 1);
  for (int i = 0; i < d; ++i) m(i, i) = t;
  return m;
}

RatMat g_matrix_exact(int d, const Rat& e_t_over_d) {
  if (e_t_over_d <= 0) throw DomainError("g_t multiplier must be positive");
  RatMat m = RatMat::identity(d + 1);
  for (int i = 0; i < d; ++i) m(i, i) = e_t_over_d;
  m(d, d) = pow_rat(e_t_over_d, -d);
  return m;
}

std::vector<double> g_diag(int d, double t) {
  std::vector<double> diag(d + 1, std::exp(t / d));
  diag[d] = std::exp(-t);
  return diag;
}

namespace {

// Exact membership test for the A_n^* inequality at (p, q): primitive,
// 2^{n-1} <= |q| < 2^n and |q x - p|_sup < psi(2^n).
bool certify_witness(const std::vector<Rat>& x, const ApproxFunction& psi,
                     long n, const std::vector<Int>& p, const Int& q) {
  Int qa = abs(q);
  Int lo = pow_int(2, static_cast<unsigned long>(n - 1));
  Int hi = pow_int(2, static_cast<unsigned long>(n));
  if (qa < lo || qa >= hi) return false;
  Int g = qa;
  for (const auto& pi : p) {
    Int api = abs(pi);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), api.get_mpz_t());
  }
  if (g != 1) return false;
  Rat err(0);
  for (std::size_t i = 0; i < x.size(); ++i)
    err = std::max(err, rat_abs(x[i] * Rat(q) - Rat(p[i])));
  if (err == 0) return true;  // exact rational hit
  if (psi.dyadic_exact()) return psi.compare_dyadic(err, n) < 0;
  return to_d(err) < psi.eval(std::ldexp(1.0, static_cast<int>(n)));
}

std::vector<Int> nearest_ints(const std::vector<Rat>& x, const Int& q) {
  std::vector<Int> p;
  for (const auto& xi : x) {
    Rat qx = xi * Rat(q);
    Int pi;
    Int twice = 2 * qx.get_num() + qx.get_den();
    Int den2 = 2 * qx.get_den();
    mpz_fdiv_q(pi.get_mpz_t(), twice.get_mpz_t(), den2.get_mpz_t());
    p.push_back(pi);
  }
  return p;
}

std::optional<AnStarWitness> brute_force_direct(const std::vector<Rat>& x,
                                                const ApproxFunction& psi,
                                                long n) {
  Int lo = pow_int(2, static_cast<unsigned long>(n - 1));
  Int hi = pow_int(2, static_cast<unsigned long>(n));
  if (!hi.fits_slong_p())
    throw DomainError("denominator window too large for brute force");
  double psi_val = psi.eval(std::ldexp(1.0, static_cast<int>(n)));
  int d = static_cast<int>(x.size());
  for (Int q = lo; q < hi; ++q) {
    std::vector<Int> p = nearest_ints(x, q);
    if (certify_witness(x, psi, n, p, q)) return AnStarWitness{p, q};
    // The nearest p can be imprimitive while a neighbor still satisfies the
    // inequality; that needs psi(2^n) + err > 1, so only probe offsets for
    // fat approximation functions.
    if (psi_val > 0.4999) {
      std::vector<long> off(d, -1);
      for (;;) {
        std::vector<Int> p2 = p;
        bool nonzero = false;
        for (int i = 0; i < d; ++i) {
          p2[i] += off[i];
          nonzero |= off[i] != 0;
        }
        if (nonzero && certify_witness(x, psi, n, p2, q))
          return AnStarWitness{p2, q};
        int i = 0;
        while (i < d && ++off[i] > 1) off[i++] = -1;
        if (i == d) break;
      }
    }
  }
  return std::nullopt;
}

// Convergents of x up to the limit, plus the first one past the limit when
// the expansion continues (needed to bound the last partial quotient).
std::vector<Convergent> cf_with_overflow(const Rat& x, const Int& q_limit) {
  std::vector<Convergent> out;
  Int h_prev(1), h_prev2(0);
  Int k_prev(0), k_prev2(1);
  Rat rem = x;
  for (int guard = 0; guard < 100000; ++guard) {
    Int a;
    mpz_fdiv_q(a.get_mpz_t(), rem.get_num().get_mpz_t(),
               rem.get_den().get_mpz_t());
    Int h = a * h_prev + h_prev2;
    Int k = a * k_prev + k_prev2;
    out.push_back({h, k});
    if (k > q_limit) break;
    h_prev2 = h_prev; h_prev = h;
    k_prev2 = k_prev; k_prev = k;
    Rat frac = rem - Rat(a);
    if (frac == 0) break;
    rem = Rat(1) / frac;
  }
  return out;
}

// d = 1 fast path: all solutions of |qx - p| < psi(2^n) <= 2^{-n} with
// q < 2^n are semiconvergents of x, and within a semiconvergent family the
// error decreases in the step index, so only the largest index inside the
// dyadic window needs testing.
std::optional<AnStarWitness> cf_direct(const Rat& x, const ApproxFunction& psi,
                                       long n,
                                       const std::vector<Convergent>& conv) {
  Int lo = pow_int(2, static_cast<unsigned long>(n - 1));
  Int hi = pow_int(2, static_cast<unsigned long>(n));
  auto in_window = [&](const Int& q) { return q >= lo && q < hi; };

  for (std::size_t k = 0; k < conv.size(); ++k) {
    Int qk = conv[k].q;
    Int pk = conv[k].p;
    if (in_window(qk)) {
      std::vector<Int> p{pk};
      if (certify_witness({x}, psi, n, p, qk)) return AnStarWitness{p, qk};
    }
    if (qk >= hi) break;
    if (k + 1 < conv.size()) {
      // Semiconvergent family q(j) = q_{k-1} + j q_k, 1 <= j < a_{k+1},
      // ending at the next convergent. The error |q(j)x - p(j)| decreases
      // in j, so the largest j with q(j) < 2^n dominates the window.
      Int q_prev = k == 0 ? Int(0) : conv[k - 1].q;
      Int p_prev = k == 0 ? Int(1) : conv[k - 1].p;
      Int a_next = (conv[k + 1].q - q_prev) / qk;
      if (a_next >= 2) {
        Int j_hi = (hi - 1 - q_prev) / qk;  // largest j with q(j) < 2^n
        Int j = std::min(Int(a_next - 1), j_hi);
        if (j >= 1) {
          Int q = q_prev + j * qk;
          if (in_window(q)) {
            std::vector<Int> p{p_prev + j * pk};
            if (certify_witness({x}, psi, n, p, q)) return AnStarWitness{p, q};
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<AnStarWitness> lattice_mode(const std::vector<Rat>& x,
                                          const ApproxFunction& psi, long n) {
  int d = static_cast<int>(x.size());
  DynamicalProfile prof = dyadic_profile(psi, n);
  double e_r = std::exp(-prof.r);
  // Box for w = g_{t_n} u(x) v: first d coordinates open below e^{-r},
  // last coordinate in [e^{-r}/2, e^{-r}). Coefficient bounds from the
  // inverse basis, padded before exact certification.
  std::vector<double> gt = g_diag(d, prof.t);
  // v = (c_1..c_d, q); w_i = gt_i (c_i + q x_i), w_{d+1} = gt_d q.
  double q_bound = e_r / gt[d] * (1 + 1e-9);
  if (q_bound > 9e18) throw DomainError("lattice mode window overflow");
  Int lo = pow_int(2, static_cast<unsigned long>(n - 1));
  Int hi = pow_int(2, static_cast<unsigned long>(n));
  for (Int q = lo; q < hi; ++q) {
    // |c_i + q x_i| < e^{-r} / gt_i (1 + slack)
    double ci_rad = e_r / gt[0] * (1 + 1e-9);
    std::vector<std::pair<long, long>> ranges;
    bool feasible = true;
    for (int i = 0; i < d; ++i) {
      double qx = to_d(x[i]) * to_d(Rat(q));
      long clo = static_cast<long>(std::ceil(-qx - ci_rad - 1));
      long chi = static_cast<long>(std::floor(-qx + ci_rad + 1));
      if (clo > chi) { feasible = false; break; }
      ranges.emplace_back(clo, chi);
    }
    if (!feasible) continue;
    std::vector<long> c(d, 0);
    std::function<std::optional<AnStarWitness>(int)> rec =
        [&](int idx) -> std::optional<AnStarWitness> {
      if (idx == d) {
        std::vector<Int> p;
        for (int i = 0; i < d; ++i) p.push_back(Int(-c[i]));
        if (certify_witness(x, psi, n, p, q)) return AnStarWitness{p, q};
        return std::nullopt;
      }
      for (long v = ranges[idx].first; v <= ranges[idx].second; ++v) {
        c[idx] = v;
        if (auto w = rec(idx + 1)) return w;
      }
      return std::nullopt;
    };
    if (auto w = rec(0)) return w;
  }
  return std::nullopt;
}

}  // namespace

std::optional<AnStarWitness> an_star_test(const std::vector<Rat>& x,
                                          const ApproxFunction& psi, long n,
                                          AnStarMode mode) {
  if (n < 1) throw DomainError("an_star_test: n must be >= 1");
  int d = static_cast<int>(x.size());
  if (d < 1 || d > 3) throw DomainError("an_star_test: dimension 1..3 only");
  if (mode == AnStarMode::Lattice) return lattice_mode(x, psi, n);
  if (d == 1) {
    // CF fast path is valid when psi(2^n) <= 2^{-n}; otherwise brute force.
    bool normalized =
        psi.dyadic_exact()
            ? psi.compare_dyadic(pow_rat(Rat(1, 2), n), n) >= 0
            : psi.eval(std::ldexp(1.0, int(n))) <= std::ldexp(1.0, int(-n));
    if (normalized) {
      auto conv =
          cf_with_overflow(x[0], pow_int(2, static_cast<unsigned long>(n)));
      return cf_direct(x[0], psi, n, conv);
    }
  }
  return brute_force_direct(x, psi, n);
}

AnStarScanner::AnStarScanner(const Rat& x, long max_n)
    : x_(x), max_n_(max_n),
      conv_(cf_with_overflow(x, pow_int(2, static_cast<unsigned long>(max_n)))) {}

std::optional<AnStarWitness> AnStarScanner::test(const ApproxFunction& psi,
                                                 long n) const {
  if (n < 1 || n > max_n_) throw DomainError("AnStarScanner: n out of range");
  bool normalized =
      psi.dyadic_exact()
          ? psi.compare_dyadic(pow_rat(Rat(1, 2), n), n) >= 0
          : psi.eval(std::ldexp(1.0, int(n))) <= std::ldexp(1.0, int(-n));
  if (!normalized) return brute_force_direct({x_}, psi, n);
  return cf_direct(x_, psi, n, conv_);
}

}  // namespace fraclab
