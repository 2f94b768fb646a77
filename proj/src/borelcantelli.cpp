#include "fraclab/borelcantelli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "fraclab/kv.hpp"

namespace fraclab {

EventFamily EventFamily::constant(const Rat& c) {
  if (c <= 0 || c > 1) throw DomainError("constant measure must be in (0,1]");
  return independent_from([c](long) { return c; });
}

EventFamily EventFamily::harmonic() {
  return independent_from([](long n) { return Rat(1, n); });
}

EventFamily EventFamily::independent_from(std::function<Rat(long)> mu) {
  EventFamily f;
  f.measure = mu;
  f.pair_measure = [mu](long m, long n) -> Rat {
    if (m == n) return mu(m);
    return mu(m) * mu(n);
  };
  f.independent = true;
  return f;
}

EventFamily EventFamily::from_file(const std::string& path) {
  auto kvs = parse_kv_file(path);
  std::string mu_spec, pair_spec = "independent";
  for (const auto& kv : kvs) {
    if (kv.key == "mu") mu_spec = kv.value;
    else if (kv.key == "pair") pair_spec = kv.value;
    else throw DomainError("line " + std::to_string(kv.line_no) +
                           ": unknown key " + kv.key);
  }
  if (mu_spec.empty()) throw DomainError("event family: mu required");
  if (pair_spec != "independent")
    throw DomainError("event family: only pair = independent is built in");
  if (mu_spec.rfind("const:", 0) == 0)
    return constant(parse_rat(mu_spec.substr(6)));
  if (mu_spec == "harmonic") return harmonic();
  throw DomainError("event family: unknown mu spec " + mu_spec);
}

void BcConstants::validate() const {
  if (c_sharp < 1 || c_star < 1 || d_const < 1)
    throw DomainError("BC constants C#, C*, D must be >= 1");
  if (eps_star <= 0) throw DomainError("eps* must be positive");
  if (!(sigma > 0 && sigma < 1)) throw DomainError("sigma must be in (0,1)");
  if (!(a > 0 && a <= 1.0 / sigma)) throw DomainError("a must be in (0,1/sigma]");
}

Rat chung_erdos(const EventFamily& events, long m_lo, long n_hi) {
  std::vector<long> idx;
  for (long n = m_lo; n <= n_hi; ++n) idx.push_back(n);
  return chung_erdos_subset(events, idx);
}

Rat chung_erdos_subset(const EventFamily& events, const std::vector<long>& idx) {
  Rat num(0), den(0);
  for (long r : idx) num += events.measure(r);
  for (long r : idx)
    for (long s : idx) den += events.pair_measure(std::min(r, s), std::max(r, s));
  if (den == 0) throw DomainError("Chung-Erdos: zero denominator");
  return num * num / den;
}

SparseSelection sparse_select(const EventFamily& events,
                              const BcConstants& constants, long n_max) {
  constants.validate();
  SparseSelection sel;
  Rat one_eps = Rat(1) + constants.eps_star;
  // Round C* up to an integer power of (1 + eps*).
  long ell_star = 0;
  Rat c_eff(1);
  while (c_eff < constants.c_star) {
    c_eff *= one_eps;
    ++ell_star;
  }
  if (ell_star == 0) { c_eff = one_eps; ell_star = 1; }
  sel.ell_star = ell_star;
  sel.c_star_effective = c_eff;

  sel.total_mass = 0;
  bool any_positive = false;
  for (long n = 1; n <= n_max; ++n) {
    Rat mu = events.measure(n);
    if (mu > 0) any_positive = true;
    sel.total_mass += mu;
  }
  if (!any_positive) throw DomainError("sparse_select: all measures vanish");

  auto floor_int = [](const Rat& x) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return f;
  };

  Rat base = c_eff;
  for (long k = 1;; ++k) {
    if (base > n_max) break;
    SparseBlock best;
    bool have = false;
    Rat q = base;
    for (long ell = 0; ell < ell_star; ++ell) {
      // Integers n with q <= n < (1+eps*) q, clamped to [1, n_max]. Real
      // endpoints, so consecutive sub-blocks tile [C^k, C^{k+1}) exactly
      // and the divergence-retention count works.
      Int first_i = floor_int(q);
      if (Rat(first_i) < q) first_i += 1;
      Rat upper = one_eps * q;
      Int last_i = floor_int(upper);
      if (Rat(last_i) == upper) last_i -= 1;
      long first = first_i.fits_slong_p() ? first_i.get_si() : n_max + 1;
      long last = last_i.fits_slong_p() ? std::min(last_i.get_si(), n_max)
                                        : n_max;
      Rat mass(0);
      for (long n = std::max(first, 1L); n <= last; ++n)
        mass += events.measure(n);
      SparseBlock blk{k, ell, q, std::max(first, 1L), last, mass};
      if (!have || mass > best.mass) {
        best = blk;
        have = true;
      }
      q *= one_eps;
    }
    if (have) sel.blocks.push_back(best);
    base *= c_eff;
  }

  Rat even_mass(0), odd_mass(0);
  for (const auto& blk : sel.blocks)
    (blk.k % 2 == 0 ? even_mass : odd_mass) += blk.mass;
  sel.even_chosen = even_mass >= odd_mass;
  sel.selected_mass = sel.even_chosen ? even_mass : odd_mass;
  for (const auto& blk : sel.blocks) {
    if ((blk.k % 2 == 0) != sel.even_chosen) continue;
    for (long n = blk.first; n <= blk.last; ++n) sel.chosen.push_back(n);
  }
  std::sort(sel.chosen.begin(), sel.chosen.end());
  return sel;
}

BcReport bc_verify_and_bound(const EventFamily& events,
                             const BcConstants& constants, long m_lo,
                             long n_hi) {
  constants.validate();
  if (m_lo < 1 || n_hi < m_lo) throw DomainError("bad index range");
  BcReport rep;

  std::vector<Rat> mu(n_hi + 1);
  for (long n = m_lo; n <= n_hi; ++n) mu[n] = events.measure(n);

  // Hypothesis 1: positivity (divergence is a property of the infinite
  // family; the partial sum is reported through total_mass below).
  HypothesisCheck h1{"positivity", true, "", 0};
  for (long n = m_lo; n <= n_hi; ++n)
    if (mu[n] <= 0) {
      h1.holds = false;
      h1.worst_pair = "n=" + std::to_string(n);
      break;
    }
  rep.hypotheses.push_back(h1);

  double csharp = to_d(constants.c_sharp);
  double cstar = to_d(constants.c_star);
  double epsstar = to_d(constants.eps_star);
  double dconst = to_d(constants.d_const);
  double sigma = constants.sigma;
  double a = constants.a;

  // Hypothesis 2: long-range / intermediate quasi-independence.
  HypothesisCheck h2{"long_range", true, "", 1e300};
  for (long m = m_lo; m <= n_hi; ++m)
    for (long n = m; n <= n_hi; ++n) {
      bool sep = double(n) >= cstar * double(m) ||
                 double(n) <= (1.0 + epsstar) * double(m);
      if (!sep) continue;
      double lhs = to_d(events.pair_measure(m, n));
      double rhs = csharp * to_d(mu[m]) * to_d(mu[n]) +
                   dconst * (std::exp(-sigma * m) * to_d(mu[n]) +
                             std::exp(-sigma * (n - m)));
      double margin = rhs - lhs;
      if (margin < h2.margin) {
        h2.margin = margin;
        h2.worst_pair = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
      }
      if (lhs > rhs * (1 + 1e-12)) h2.holds = false;
    }
  rep.hypotheses.push_back(h2);

  // Hypothesis 3: short-range bound.
  HypothesisCheck h3{"short_range", true, "", 1e300};
  for (long m = m_lo; m <= n_hi; ++m)
    for (long n = m; n <= n_hi; ++n) {
      double lhs = to_d(events.pair_measure(m, n));
      double rhs = dconst * to_d(mu[m]) *
                   std::max(std::pow(to_d(mu[n]), sigma),
                            std::pow(2.0, -sigma * double(n - m)));
      double margin = rhs - lhs;
      if (margin < h3.margin) {
        h3.margin = margin;
        h3.worst_pair = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
      }
      if (lhs > rhs * (1 + 1e-12)) h3.holds = false;
    }
  rep.hypotheses.push_back(h3);

  // Hypothesis 4: weak monotonicity within f(m) = ceil(-a log mu(E_m)).
  HypothesisCheck h4{"weak_monotonicity", true, "", 1e300};
  for (long m = m_lo; m <= n_hi; ++m) {
    double lm = std::log(to_d(mu[m]));
    long f = static_cast<long>(std::ceil(-a * lm));
    if (f < 1) f = 1;
    for (long n = m; n <= std::min(n_hi, m + f); ++n) {
      double lhs = to_d(mu[n]);
      double rhs = dconst * std::pow(to_d(mu[m]), sigma);
      double margin = rhs - lhs;
      if (margin < h4.margin) {
        h4.margin = margin;
        h4.worst_pair = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
      }
      if (lhs > rhs * (1 + 1e-12)) h4.holds = false;
    }
  }
  rep.hypotheses.push_back(h4);

  rep.all_hold = true;
  for (const auto& h : rep.hypotheses) rep.all_hold = rep.all_hold && h.holds;

  rep.selection = sparse_select(events, constants, n_hi);
  std::vector<long> sel_range;
  for (long n : rep.selection.chosen)
    if (n >= m_lo) sel_range.push_back(n);

  rep.ce_bound_full = chung_erdos(events, m_lo, n_hi);
  rep.ce_bound_selected =
      sel_range.empty() ? Rat(0) : chung_erdos_subset(events, sel_range);

  if (!sel_range.empty()) {
    Rat num(0), den(0);
    for (long r : sel_range) num += events.measure(r);
    for (long r : sel_range)
      for (long s : sel_range)
        den += events.pair_measure(std::min(r, s), std::max(r, s));
    rep.double_sum_ratio = num == 0 ? 0.0 : to_d(den / (num * num));
  } else {
    rep.double_sum_ratio = 0.0;
  }

  rep.union_lower_bound = std::max(rep.ce_bound_full, rep.ce_bound_selected);
  if (events.independent) {
    // Exact union over [M, N] on the Bernoulli backend.
    Rat survive(1);
    for (long n = m_lo; n <= n_hi; ++n) survive *= (Rat(1) - mu[n]);
    rep.exact_union_full = Rat(1) - survive;
    rep.union_lower_bound = std::max(rep.union_lower_bound, *rep.exact_union_full);
  }
  return rep;
}

namespace {

int matrix_rank(std::vector<RatVec> rows, int cols) {
  int r = 0;
  for (int c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][c] != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    for (int i = r + 1; i < static_cast<int>(rows.size()); ++i) {
      if (rows[i][c] == 0) continue;
      Rat f = rows[i][c] / rows[r][c];
      for (int j = c; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return r;
}

// Nonzero rational nullspace vector of the k x c matrix, or empty if full
// column rank.
RatVec nullspace_vector(std::vector<RatVec> rows, int cols) {
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][c] != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    Rat p = rows[r][c];
    for (int j = 0; j < cols; ++j) rows[r][j] /= p;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rat f = rows[i][c];
      for (int j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (r == cols) return {};  // full column rank
  // Pick the first non-pivot column as the free variable.
  std::set<int> pivots(pivot_col.begin(), pivot_col.end());
  int free_col = 0;
  while (pivots.count(free_col)) ++free_col;
  RatVec v(cols, Rat(0));
  v[free_col] = 1;
  for (int i = 0; i < r; ++i) v[pivot_col[i]] = -rows[i][free_col];
  return v;
}

}  // namespace

SimplexResult simplex_check(const RatVec& center, const Rat& radius, long n_den,
                            int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (radius <= 0) throw DomainError("radius must be positive");
  if (n_den < 2) throw DomainError("need N >= 2 (denominators 0 < |q| < N)");
  SimplexResult out;

  // Vol(B) = (2r)^d < 1/(d! N^{d+1})
  Rat vol = pow_rat(2 * radius, d);
  Rat fact(1);
  for (int i = 2; i <= d; ++i) fact *= i;
  out.precondition_ok = vol < Rat(1) / (fact * pow_rat(Rat(n_den), d + 1));

  // Enumerate Q(N) cap B exactly, deduplicating reduced points.
  std::set<std::string> seen;
  auto ceil_int = [](const Rat& x) {
    Int f;
    mpz_cdiv_q(f.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return f;
  };
  auto floor_int = [](const Rat& x) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return f;
  };
  for (long q = 1; q < n_den; ++q) {
    std::vector<std::pair<Int, Int>> ranges;
    bool empty = false;
    for (int i = 0; i < d; ++i) {
      Int lo = ceil_int(Rat(q) * (center[i] - radius));
      Int hi = floor_int(Rat(q) * (center[i] + radius));
      if (lo > hi) { empty = true; break; }
      ranges.emplace_back(lo, hi);
    }
    if (empty) continue;
    std::vector<Int> p(d);
    std::function<void(int)> rec = [&](int idx) {
      if (idx == d) {
        RatVec pt(d);
        std::string key;
        for (int i = 0; i < d; ++i) {
          pt[i] = Rat(p[i], q);
          pt[i].canonicalize();
          key += rat_str(pt[i]) + ";";
        }
        if (seen.insert(key).second) out.points.push_back(pt);
        return;
      }
      for (Int v = ranges[idx].first; v <= ranges[idx].second; ++v) {
        p[idx] = v;
        rec(idx + 1);
      }
    };
    rec(0);
  }

  // Affine hyperplane through all points: nonzero (a_0, a) with
  // a_0 + a . x = 0 for all x; exists iff the (1, x) rows have rank <= d.
  std::vector<RatVec> rows;
  for (const auto& pt : out.points) {
    RatVec row(d + 1);
    row[0] = 1;
    for (int i = 0; i < d; ++i) row[i + 1] = pt[i];
    rows.push_back(row);
  }
  if (out.points.empty()) {
    out.hyperplane_found = true;
    out.hyperplane_normal = RatVec(d, Rat(0));
    out.hyperplane_normal[0] = 1;
    out.hyperplane_offset = 0;
    return out;
  }
  RatVec v = nullspace_vector(rows, d + 1);
  if (!v.empty()) {
    out.hyperplane_found = true;
    out.hyperplane_normal = RatVec(v.begin() + 1, v.end());
    out.hyperplane_offset = -v[0];
    return out;
  }
  out.hyperplane_found = false;
  // Extract d+1 affinely independent points as the counterexample.
  std::vector<RatVec> chosen;
  std::vector<RatVec> staged;
  for (const auto& pt : out.points) {
    RatVec row(d + 1);
    row[0] = 1;
    for (int i = 0; i < d; ++i) row[i + 1] = pt[i];
    std::vector<RatVec> trial = staged;
    trial.push_back(row);
    if (matrix_rank(trial, d + 1) > matrix_rank(staged, d + 1)) {
      staged = std::move(trial);
      chosen.push_back(pt);
      if (chosen.size() == static_cast<std::size_t>(d + 1)) break;
    }
  }
  out.counterexample = chosen;
  return out;
}

}  // namespace fraclab
