#include "fraclab/sarith.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fraclab {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

double PPower::value(long p) const {
  if (infinite) return std::numeric_limits<double>::infinity();
  return std::pow(double(p), double(exp));
}

long padic_valuation(const Int& x, long p) {
  if (x == 0) throw DomainError("valuation of zero");
  Int n = abs(x);
  long v = 0;
  while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

long padic_valuation(const Rat& x, long p) {
  if (x == 0) throw DomainError("valuation of zero");
  return padic_valuation(x.get_num(), p) - padic_valuation(x.get_den(), p);
}

PPower padic_norm(const Rat& x, long p) {
  if (!is_prime(p)) throw DomainError("p must be prime");
  if (x == 0) return PPower{0, true};
  return PPower{-padic_valuation(x, p), false};
}

PPower padic_norm(const RatMat& m, long p) {
  if (!is_prime(p)) throw DomainError("p must be prime");
  bool any = false;
  long best = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j) == 0) continue;
      long e = -padic_valuation(m(i, j), p);
      if (!any || e > best) best = e;
      any = true;
    }
  if (!any) throw DomainError("p-adic norm of zero matrix");
  return PPower{best, false};
}

KakExponents kak_exponents(const RatMat& m, long p) {
  if (!is_prime(p)) throw DomainError("p must be prime");
  if (m.rows() != m.cols()) throw DomainError("square matrix required");
  if (m.det() == 0) throw DomainError("singular matrix");
  int n = m.rows();
  RatMat a(m);
  // Smith normal form over the localization at p: pivot on the minimal
  // p-valuation entry; division by the pivot is then p-integral, so only the
  // p-valuations of the resulting diagonal matter.
  std::vector<long> diag_val;
  for (int k = 0; k < n; ++k) {
    long best_v = 0;
    int bi = -1, bj = -1;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        if (a(i, j) == 0) continue;
        long v = padic_valuation(a(i, j), p);
        if (bi < 0 || v < best_v) {
          best_v = v;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) throw DomainError("singular matrix");
    if (bi != k)
      for (int j = k; j < n; ++j) std::swap(a(bi, j), a(k, j));
    if (bj != k)
      for (int i = k; i < n; ++i) std::swap(a(i, bj), a(i, k));
    for (int i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rat f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
    for (int j = k + 1; j < n; ++j) {
      if (a(k, j) == 0) continue;
      Rat f = a(k, j) / a(k, k);
      for (int i = k; i < n; ++i) a(i, j) -= f * a(i, k);
    }
    diag_val.push_back(best_v);
  }
  // diag_val is non-decreasing; normalize projectively to n_i = v_max - v_i,
  // sorted non-increasing with minimum 0.
  long vmax = *std::max_element(diag_val.begin(), diag_val.end());
  KakExponents out;
  for (long v : diag_val) out.exps.push_back(vmax - v);
  std::sort(out.exps.begin(), out.exps.end(), std::greater<long>());
  return out;
}

PPower adjoint_norm_p(const RatMat& m, long p) {
  return PPower{kak_exponents(m, p).top(), false};
}

double adjoint_norm_inf(const RatMat& m) {
  int n = m.rows();
  if (m.det() == 0) throw DomainError("singular matrix");
  // Conjugation on trace-zero matrices in an orthonormal basis w.r.t.
  // <L,M> = tr(L^T M). Basis: E_ij (i != j) and the diagonal chain
  // (e_k - e_{k+1})/sqrt(2) completed by Gram-Schmidt; any orthonormal basis
  // works, so build one numerically.
  Eigen::MatrixXd md(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) md(i, j) = to_d(m(i, j));
  Eigen::MatrixXd minv = md.inverse();

  int dim = n * n - 1;
  std::vector<Eigen::MatrixXd> basis;
  // Off-diagonal elementary matrices are already orthonormal.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
        e(i, j) = 1;
        basis.push_back(e);
      }
  // Trace-zero diagonals, Gram-Schmidt over the diagonal entries.
  std::vector<Eigen::VectorXd> diags;
  for (int k = 0; k + 1 < n; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(k) = 1;
    v(k + 1) = -1;
    for (const auto& u : diags) v -= v.dot(u) * u;
    v.normalize();
    diags.push_back(v);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) e(i, i) = v(i);
    basis.push_back(e);
  }
  Eigen::MatrixXd op(dim, dim);
  for (int c = 0; c < dim; ++c) {
    Eigen::MatrixXd img = md * basis[c] * minv;
    for (int r = 0; r < dim; ++r)
      op(r, c) = (basis[r].array() * img.array()).sum();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(op);
  return svd.singularValues()(0);
}

RatMat projective_normalize(const RatMat& m) {
  if (m.is_zero()) throw DomainError("cannot normalize the zero matrix");
  Int lcm(1);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) {
        Int den = m(i, j).get_den();
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
      }
  RatMat scaled = m * Rat(lcm);
  Int content(0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (scaled(i, j) != 0) {
        Int num = abs(scaled(i, j).get_num());
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), num.get_mpz_t());
      }
  RatMat out = scaled * Rat(Int(1), content);
  // Fix the sign of the first nonzero entry (row-major).
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      if (out(i, j) != 0) {
        if (out(i, j) < 0) out = out * Rat(-1);
        return out;
      }
  return out;
}

bool projectively_equal(const RatMat& a, const RatMat& b) {
  return projective_normalize(a) == projective_normalize(b);
}

SElement::SElement(RatMat arch, RatMat fin, std::set<long> primes)
    : arch_(projective_normalize(arch)), fin_(projective_normalize(fin)),
      primes_(std::move(primes)) {
  if (arch_.det() == 0 || fin_.det() == 0)
    throw DomainError("SElement components must be invertible");
}

SElement SElement::identity(int n, std::set<long> primes) {
  return SElement(RatMat::identity(n), RatMat::identity(n), std::move(primes));
}

SElement SElement::operator*(const SElement& o) const {
  return SElement(arch_ * o.arch_, fin_ * o.fin_, primes_);
}

SElement SElement::inverse() const {
  return SElement(arch_.inverse(), fin_.inverse(), primes_);
}

bool SElement::operator==(const SElement& o) const {
  return arch_ == o.arch_ && fin_ == o.fin_;
}

std::string SElement::serialize() const {
  std::ostringstream os;
  auto emit = [&](const RatMat& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        os << ((i || j) ? "," : "") << rat_str(m(i, j));
  };
  emit(arch_);
  os << ";";
  emit(fin_);
  return os.str();
}

namespace {

RatMat embed_rotation(const RatMat& rot) {
  int d = rot.rows();
  RatMat k = RatMat::identity(d + 1);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) k(i, j) = rot(i, j);
  return k;
}

RatMat u_mat(const RatVec& x) {
  int d = static_cast<int>(x.size());
  RatMat m = RatMat::identity(d + 1);
  for (int i = 0; i < d; ++i) m(i, d) = x[i];
  return m;
}

RatMat a_mat(int d, const Rat& t) {
  RatMat m = RatMat::identity(d + 1);
  for (int i = 0; i < d; ++i) m(i, i) = t;
  return m;
}

}  // namespace

SElement gamma_element(const RationalIfs& ifs, const Word& w) {
  SimilarityMap fw = ifs.compose_word(w);
  int d = ifs.dim();
  RatMat k = embed_rotation(fw.rot);
  RatMat a = a_mat(d, fw.rho);
  RatMat arch = a * k;
  RatMat fin = u_mat(vec_scale(Rat(-1), fw.shift)) * a * k;
  return SElement(arch, fin, ifs.primes());
}

RatMat gamma_tilde(const RationalIfs& ifs, const Word& w) {
  SimilarityMap fw = ifs.compose_word(w);
  RatMat m = u_mat(vec_scale(Rat(-1), fw.shift)) * a_mat(ifs.dim(), fw.rho) *
             embed_rotation(fw.rot);
  return projective_normalize(m);
}

bool verify_key_identity(const RationalIfs& ifs, const Word& w,
                         const RatVec& x) {
  int d = ifs.dim();
  SElement gamma = gamma_element(ifs, w);
  SimilarityMap fw = ifs.compose_word(w);
  SElement ux(u_mat(x), RatMat::identity(d + 1), ifs.primes());
  SElement ub(u_mat(fw.shift), RatMat::identity(d + 1), ifs.primes());
  SElement lhs = gamma * ux * gamma.inverse() * ub;
  SElement rhs(u_mat(fw.apply(x)), RatMat::identity(d + 1), ifs.primes());
  return lhs == rhs;
}

bool in_gamma_s(const RatMat& m, const std::set<long>& primes) {
  RatMat n = projective_normalize(m);
  Rat det = n.det();
  if (det == 0) return false;
  Int num = abs(det.get_num());
  // Normalized entries are integers with content 1, so membership reduces to
  // the determinant being an S-unit.
  if (det.get_den() != 1) return false;
  for (long p : primes)
    while (mpz_divisible_ui_p(num.get_mpz_t(), static_cast<unsigned long>(p)))
      mpz_divexact_ui(num.get_mpz_t(), num.get_mpz_t(),
                      static_cast<unsigned long>(p));
  return num == 1;
}

MembershipReport lattice_membership_and_freeness(const RationalIfs& ifs, int n) {
  MembershipReport rep;
  double total = std::pow(double(ifs.alphabet_size()), double(n));
  if (total > 1e6) throw DomainError("freeness check: alphabet^n exceeds 1e6");

  std::map<std::string, Word> canon;
  std::function<void(Word&, int)> rec = [&](Word& w, int depth) {
    if (!rep.all_members || !rep.injective) return;
    if (!w.empty()) {
      ++rep.words_checked;
      RatMat gt = gamma_tilde(ifs, w);
      if (!in_gamma_s(gt, ifs.primes())) {
        rep.all_members = false;
        rep.offending = w;
        return;
      }
      if (static_cast<int>(w.size()) == n) {
        std::ostringstream os;
        for (int i = 0; i < gt.rows(); ++i)
          for (int j = 0; j < gt.cols(); ++j)
            os << rat_str(gt(i, j)) << ",";
        auto [it, fresh] = canon.emplace(os.str(), w);
        if (!fresh) {
          rep.injective = false;
          rep.collision = std::make_pair(it->second, w);
          return;
        }
      }
    }
    if (depth == n) return;
    for (int i = 0; i < ifs.alphabet_size(); ++i) {
      w.push_back(i);
      rec(w, depth + 1);
      w.pop_back();
    }
  };
  Word w;
  rec(w, 0);
  return rep;
}

IndexBound index_bound(const RationalIfs& ifs, const Word& w, int n) {
  if (n < 0) throw DomainError("index_bound: n must be >= 0");
  IndexBound out;
  int d = ifs.dim();
  out.missing_digit_path = ifs.is_missing_digit();
  if (out.missing_digit_path) {
    out.a_const = 6;
    out.l_const = 3;
  } else {
    // c_p = max_i |gamma_i|_p; rho_min^{-L_p} = rho_max^{-A_p} = c_p.
    double sum_l = 0, sum_a = 0;
    double log_rmin = -std::log(to_d(ifs.rho_min()));
    double log_rmax = -std::log(to_d(ifs.rho_max()));
    for (long p : ifs.primes()) {
      long cexp = 0;
      for (int i = 0; i < ifs.alphabet_size(); ++i) {
        Word wi{i};
        SElement g = gamma_element(ifs, wi);
        cexp = std::max(cexp, adjoint_norm_p(g.fin(), p).exp);
      }
      double log_cp = double(cexp) * std::log(double(p));
      if (log_cp <= 0) continue;
      // Equal-ratio IFS degenerate case: L_p = A_p = log c_p / log(1/rho).
      sum_l += log_cp / log_rmin;
      sum_a += log_cp / (log_rmax > 0 ? log_rmax : log_rmin);
    }
    double dd = double(d * d + 2 * d);
    out.l_const = dd * sum_l;
    out.a_const = 2.0 * dd * sum_a;
  }
  double rho_w = to_d(ifs.word_rho(w));
  double rho_min = to_d(ifs.rho_min());
  out.factor = std::pow(rho_w, -out.a_const) * std::pow(rho_min, -double(n) * out.l_const);
  return out;
}

Int sl_order(int d, long p, long nu) {
  if (nu < 0) throw DomainError("sl_order: nu must be >= 0");
  if (!is_prime(p)) throw DomainError("sl_order: p must be prime");
  if (nu == 0) return Int(1);
  // p^{(d^2+2d) nu} prod_{k=2}^{d+1} (1 - p^{-k})
  //  = p^{(d^2+2d) nu - sum k} prod (p^k - 1).
  long exp = (long(d) * d + 2 * d) * nu;
  Int result(1);
  for (long k = 2; k <= d + 1; ++k) {
    result *= pow_int(static_cast<unsigned long>(p),
                      static_cast<unsigned long>(k)) - 1;
    exp -= k;
  }
  if (exp < 0) throw std::logic_error("sl_order exponent underflow");
  result *= pow_int(static_cast<unsigned long>(p),
                    static_cast<unsigned long>(exp));
  return result;
}

long v_exponent(int d) { return (d / 2 + 1) * ((d + 1) / 2); }

ShellSum shell_and_modular(long p, long n, int d) {
  if (!is_prime(p)) throw DomainError("p must be prime");
  if (n < 0) throw DomainError("shell index must be >= 0");
  ShellSum out;
  out.sum = 0;
  out.tuple_count = 0;
  if (n == 0) {
    out.values = {Rat(1)};
    out.sum = 1;
    out.bracket_lo = 1;
    out.bracket_hi = 1;
    out.tuple_count = 1;
    return out;
  }
  // Tuples n = n_1 >= n_2 >= ... >= n_d >= 0.
  std::vector<long> tuple(d);
  tuple[0] = n;
  std::function<void(int, long)> rec = [&](int idx, long cap) {
    if (idx == d) {
      long e = 0;
      for (int i = 0; i < d; ++i) e += tuple[i] * (d + 2 - 2 * (i + 1));
      Rat val = pow_rat(Rat(p), e);
      out.values.push_back(val);
      out.sum += val;
      out.tuple_count += 1;
      return;
    }
    for (long v = 0; v <= cap; ++v) {
      tuple[idx] = v;
      rec(idx + 1, v);
    }
  };
  rec(1, n);
  out.bracket_lo = pow_rat(Rat(p), v_exponent(d) * n);
  // |I_n^d| = binom(n + d - 1, d - 1)
  Int count;
  mpz_bin_uiui(count.get_mpz_t(), static_cast<unsigned long>(n + d - 1),
               static_cast<unsigned long>(d - 1));
  if (Int(out.tuple_count) != count)
    throw std::logic_error("shell tuple count mismatch");
  out.bracket_hi = out.bracket_lo * Rat(count);
  return out;
}

}  // namespace fraclab
