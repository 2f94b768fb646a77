#include "fraclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace fraclab {

void ExperimentConfig::validate() const {
  if (samples < 100) throw DomainError("config: need N >= 100 samples");
  if (n_hi < n_lo) throw DomainError("config: empty n range");
  if (threads < 1) throw DomainError("config: threads must be >= 1");
  if (sample_depth < 1) throw DomainError("config: sample depth must be >= 1");
  if (c_f < 0 || kappa_star <= 0 || delta <= 0 || c_prime_d < 0)
    throw DomainError("config: bracket constants out of range");
}

LatticeBasis basepoint_lattice(const RationalIfs& ifs, const Word& alpha) {
  int d = ifs.dim();
  SimilarityMap fa = ifs.compose_word(alpha);
  RatMat k = RatMat::identity(d + 1);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) k(i, j) = fa.rot(i, j);
  RatMat diag = RatMat::identity(d + 1);
  diag(d, d) = fa.rho;
  RatMat m = k.inverse() * diag * u_matrix(fa.shift);
  if (m.det() != fa.rho)
    throw std::logic_error("basepoint is not unimodular after rescaling");
  LatticeBasis basis = LatticeBasis::rescaled(m);
  return basis;
}

namespace {

// Double-precision shortest vector for the statistics path: Gauss-reduce in
// 2D, then enumerate a rigorous coefficient box.
struct DMat {
  int n;
  double a[4][4];
};

DMat to_dmat(const RatMat& m, double scale) {
  DMat d{};
  d.n = m.rows();
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j) d.a[i][j] = scale * to_d(m(i, j));
  return d;
}

DMat dmat_inverse(const DMat& m) {
  int n = m.n;
  double a[4][8];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = m.a[i][j];
    for (int j = 0; j < n; ++j) a[i][n + j] = i == j ? 1.0 : 0.0;
  }
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
    if (a[piv][k] == 0) throw DomainError("singular basis");
    if (piv != k)
      for (int j = 0; j < 2 * n; ++j) std::swap(a[piv][j], a[k][j]);
    double p = a[k][k];
    for (int j = 0; j < 2 * n; ++j) a[k][j] /= p;
    for (int i = 0; i < n; ++i) {
      if (i == k || a[i][k] == 0) continue;
      double f = a[i][k];
      for (int j = 0; j < 2 * n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  DMat inv{};
  inv.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.a[i][j] = a[i][n + j];
  return inv;
}

void gauss_reduce_2d_dbl(DMat& b) {
  auto sq = [&](int j) { return b.a[0][j] * b.a[0][j] + b.a[1][j] * b.a[1][j]; };
  for (int guard = 0; guard < 256; ++guard) {
    if (sq(0) > sq(1)) {
      std::swap(b.a[0][0], b.a[0][1]);
      std::swap(b.a[1][0], b.a[1][1]);
    }
    double mu = (b.a[0][0] * b.a[0][1] + b.a[1][0] * b.a[1][1]) / sq(0);
    double m = std::nearbyint(mu);
    if (m == 0) break;
    b.a[0][1] -= m * b.a[0][0];
    b.a[1][1] -= m * b.a[1][0];
  }
}

double dmat_shortest(const DMat& basis, const NormSpec& norm) {
  DMat b = basis;
  if (b.n == 2) gauss_reduce_2d_dbl(b);
  int n = b.n;
  std::vector<double> col(n);
  double best = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = b.a[i][j];
    double len = norm.norm(col);
    if (j == 0 || len < best) best = len;
  }
  DMat inv = dmat_inverse(b);
  long bound[4];
  for (int i = 0; i < n; ++i) {
    double row_sum = 0;
    for (int j = 0; j < n; ++j) row_sum += std::fabs(inv.a[i][j]);
    bound[i] = static_cast<long>(std::floor(row_sum * best * (1 + 1e-12))) ;
    if (bound[i] > 1000000L) throw DomainError("shortest-vector box too large");
  }
  std::vector<long> c(n, 0);
  std::vector<double> w(n);
  double best_len = best;
  std::function<void(int, bool)> rec = [&](int idx, bool leading_zero) {
    if (idx == n) {
      if (leading_zero) return;
      for (int i = 0; i < n; ++i) {
        w[i] = 0;
        for (int j = 0; j < n; ++j) w[i] += b.a[i][j] * double(c[j]);
      }
      double len = norm.norm(w);
      if (len < best_len) best_len = len;
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
  return best_len;
}

std::optional<Rat> rat_sqrt_exact(const Rat& x) {
  if (x < 0) return std::nullopt;
  Int num_root, den_root;
  mpz_sqrt(num_root.get_mpz_t(), x.get_num().get_mpz_t());
  mpz_sqrt(den_root.get_mpz_t(), x.get_den().get_mpz_t());
  if (num_root * num_root != x.get_num() || den_root * den_root != x.get_den())
    return std::nullopt;
  Rat r(num_root, den_root);
  r.canonicalize();
  return r;
}

struct SampleSet {
  std::vector<std::vector<double>> xs_dbl;
  std::vector<std::vector<Rat>> xs_rat;
};

void parallel_for(long count, int threads, const std::function<void(long)>& f) {
  if (threads <= 1) {
    for (long i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (count + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    long lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (long i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

SampleSet draw_samples(const ExperimentConfig& cfg, const RationalIfs* ifs,
                       bool keep_exact) {
  SampleSet set;
  set.xs_dbl.resize(cfg.samples);
  if (keep_exact) set.xs_rat.resize(cfg.samples);
  int d = ifs ? ifs->dim() : 1;
  // Per-sample RNG derivation keeps results independent of thread count.
  parallel_for(cfg.samples, cfg.threads, [&](long i) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(i));
    if (cfg.lebesgue || !ifs) {
      std::vector<Rat> x(d);
      for (int j = 0; j < d; ++j)
        x[j] = make_rat(Int(rng.next_u64()), pow_int(2, 64));
      if (keep_exact) set.xs_rat[i] = x;
      std::vector<double> xd(d);
      for (int j = 0; j < d; ++j) xd[j] = to_d(x[j]);
      set.xs_dbl[i] = xd;
    } else {
      auto pt = ifs->sample_point(cfg.sample_depth, rng);
      if (keep_exact) set.xs_rat[i] = pt.point;
      std::vector<double> xd(d);
      for (int j = 0; j < d; ++j) xd[j] = to_d(pt.point[j]);
      set.xs_dbl[i] = xd;
    }
  });
  return set;
}

}  // namespace

double translated_shortest_length(const LatticeBasis& base, double t,
                                  const std::vector<double>& x,
                                  const NormSpec& norm) {
  int d = norm.d;
  DMat m = to_dmat(base.mat, base.scale);
  // left-multiply by u(x): row_i += x_i * row_{d}
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= d; ++j) m.a[i][j] += x[i] * m.a[d][j];
  // left-multiply by g_t
  std::vector<double> gd = g_diag(d, t);
  for (int i = 0; i <= d; ++i)
    for (int j = 0; j <= d; ++j) m.a[i][j] *= gd[i];
  return dmat_shortest(m, norm);
}

std::vector<EquidistRow> orbit_statistic(const ExperimentConfig& cfg) {
  cfg.validate();
  RationalIfs ifs = RationalIfs::from_spec_string(cfg.ifs_spec);
  NormSpec norm = NormSpec::sup(ifs.dim());
  LatticeBasis base = basepoint_lattice(ifs, cfg.basepoint_word);
  if (!base.unimodular_exact())
    throw std::logic_error("non-unimodular basepoint");
  SampleSet samples = draw_samples(cfg, &ifs, false);

  std::vector<EquidistRow> rows;
  for (double t : cfg.ts) {
    std::vector<double> lengths(cfg.samples);
    parallel_for(cfg.samples, cfg.threads, [&](long i) {
      lengths[i] = translated_shortest_length(base, t, samples.xs_dbl[i], norm);
    });
    for (double eps : cfg.eps_list) {
      long hits = 0;
      for (long i = 0; i < cfg.samples; ++i)
        if (lengths[i] < eps) ++hits;
      double est = double(hits) / double(cfg.samples);
      HaarBracket hb = cusp_haar_bracket(eps, norm, cfg.c_prime_d);
      EquidistRow row;
      row.t = t;
      row.eps = eps;
      row.estimate = est;
      row.stderr_ = std::sqrt(est * (1 - est) / double(cfg.samples));
      row.haar_lo = hb.lower;
      row.haar_hi = hb.upper;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<D1QuantileRow> d1_quantile_statistic(const ExperimentConfig& cfg) {
  cfg.validate();
  RationalIfs ifs = RationalIfs::from_spec_string(cfg.ifs_spec);
  NormSpec norm = NormSpec::sup(ifs.dim());
  LatticeBasis base = basepoint_lattice(ifs, cfg.basepoint_word);
  SampleSet samples = draw_samples(cfg, &ifs, false);
  std::vector<D1QuantileRow> rows;
  for (double t : cfg.ts) {
    std::vector<double> d1(cfg.samples);
    parallel_for(cfg.samples, cfg.threads, [&](long i) {
      d1[i] = 1.0 / translated_shortest_length(base, t, samples.xs_dbl[i], norm);
    });
    std::sort(d1.begin(), d1.end());
    auto quantile = [&](double q) {
      auto idx = static_cast<std::size_t>(q * double(cfg.samples - 1));
      return d1[idx];
    };
    rows.push_back({t, quantile(0.5), quantile(0.9), quantile(0.99)});
  }
  return rows;
}

CorrelationRow double_correlation(const ExperimentConfig& cfg, double t,
                                  double s, double eps_t, double eps_s) {
  cfg.validate();
  if (t < s) throw DomainError("double_correlation needs t >= s");
  RationalIfs ifs = RationalIfs::from_spec_string(cfg.ifs_spec);
  NormSpec norm = NormSpec::sup(ifs.dim());
  LatticeBasis base = basepoint_lattice(ifs, cfg.basepoint_word);
  SampleSet samples = draw_samples(cfg, &ifs, false);

  std::vector<unsigned char> hit_t(cfg.samples), hit_s(cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](long i) {
    hit_t[i] =
        translated_shortest_length(base, t, samples.xs_dbl[i], norm) < eps_t;
    hit_s[i] =
        translated_shortest_length(base, s, samples.xs_dbl[i], norm) < eps_s;
  });
  long joint = 0, ct = 0, cs = 0;
  for (long i = 0; i < cfg.samples; ++i) {
    joint += hit_t[i] && hit_s[i];
    ct += hit_t[i];
    cs += hit_s[i];
  }
  CorrelationRow row;
  row.t = t;
  row.s = s;
  row.joint = double(joint) / double(cfg.samples);
  row.product =
      double(ct) / double(cfg.samples) * double(cs) / double(cfg.samples);
  row.excess = row.joint - row.product;
  row.stderr_ = std::sqrt(row.joint * (1 - row.joint) / double(cfg.samples));
  return row;
}

std::vector<KhintchineRow> khintchine_scan(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<RationalIfs> ifs;
  int d = 1;
  if (!cfg.lebesgue) {
    ifs.emplace(RationalIfs::from_spec_string(cfg.ifs_spec));
    d = ifs->dim();
    if (d != 1)
      throw DomainError("khintchine_scan is implemented for d = 1");
  }
  ApproxFunction psi = ApproxFunction::from_spec_string(d, cfg.psi_spec);

  long n_count = cfg.n_hi - cfg.n_lo + 1;
  std::vector<std::vector<long>> hits_per_thread;
  std::vector<long> hit_count(n_count, 0);
  std::vector<long> cum_count(n_count, 0);

  std::vector<std::vector<unsigned char>> hit(cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](long i) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(i));
    Rat x;
    if (cfg.lebesgue || !ifs) {
      x = make_rat(Int(rng.next_u64()), pow_int(2, 64));
    } else {
      x = ifs->sample_point(cfg.sample_depth, rng).point[0];
    }
    AnStarScanner scanner(x, cfg.n_hi);
    std::vector<unsigned char> h(n_count, 0);
    for (long n = cfg.n_lo; n <= cfg.n_hi; ++n)
      h[n - cfg.n_lo] = scanner.test(psi, n).has_value();
    hit[i] = std::move(h);
  });
  for (long i = 0; i < cfg.samples; ++i) {
    bool any = false;
    for (long k = 0; k < n_count; ++k) {
      if (hit[i][k]) ++hit_count[k];
      any = any || hit[i][k];
      if (any) ++cum_count[k];
    }
  }

  NormSpec norm = NormSpec::sup(d);
  std::vector<KhintchineRow> rows;
  for (long k = 0; k < n_count; ++k) {
    long n = cfg.n_lo + k;
    DynamicalProfile prof = dyadic_profile(psi, n);
    KhintchineRow row;
    row.n = n;
    row.t_n = prof.t;
    row.r_tn = prof.r;
    row.mu_an_hat = double(hit_count[k]) / double(cfg.samples);
    row.stderr_ =
        std::sqrt(row.mu_an_hat * (1 - row.mu_an_hat) / double(cfg.samples));
    double e = std::exp(-double(d + 1) * prof.r);  // = 2^n psi^d(2^n)
    double c_d = cusp_haar_bracket(0.5, norm, 0).c_d;
    double decay = cfg.c_f * std::exp(-cfg.kappa_star * prof.t);
    double g0_delta = cfg.kappa_star * d * std::log(2.0) / double(d + 1);
    row.in_g0 = c_d * e / 12.0 >= cfg.c_prime_d * e * e + decay +
                                      cfg.c_f * std::exp(-g0_delta * double(n));
    if (row.in_g0) {
      row.bracket_lo = c_d * e / 12.0;
      row.bracket_hi = 4.0 * c_d * e;
    } else {
      row.bracket_lo =
          std::max(0.0, c_d * e / 6.0 - cfg.c_prime_d * e * e - decay);
      row.bracket_hi = 2.0 * c_d * e + decay;
    }
    row.cum_hit = double(cum_count[k]) / double(cfg.samples);
    double psi_d = std::pow(psi.eval(std::ldexp(1.0, int(n))), d);
    row.psi_normalized = psi_d <= std::ldexp(1.0, int(-n)) * (1 + 1e-12);
    double floor_val =
        1.0 / (std::ldexp(1.0, int(n)) *
               std::pow(double(n) * std::log(2.0), 1.1));
    row.psi_above_floor = psi_d >= floor_val * (1 - 1e-12);
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct TermEval {
  double value;
  std::optional<Rat> exact;
};

TermEval evaluate_walk_test(const RatMat& total, WalkTest test, double eps,
                            const NormSpec& norm) {
  TermEval out;
  if (test == WalkTest::One) {
    out.value = 1.0;
    out.exact = Rat(1);
    return out;
  }
  LatticeBasis basis = LatticeBasis::rescaled(total);
  ShortestVector sv = shortest_vector(basis, norm);
  Rat det = rat_abs(total.det());
  if (test == WalkTest::D1) {
    out.value = sv.d1;
    // d1 = |det|^{1/(d+1)} / len, exact when the root is rational.
    if (total.rows() == 2) {
      auto root = rat_sqrt_exact(det);
      if (root) out.exact = *root / sv.length_unscaled;
    }
    return out;
  }
  // Cusp indicator: scale * len < eps,
  // i.e. len^{d+1} < eps^{d+1} |det|  (exact for dyadic eps).
  Rat eps_rat(eps);  // binary doubles convert exactly
  int n = total.rows();
  bool hit = pow_rat(sv.length_unscaled, n) < pow_rat(eps_rat, n) * det;
  out.value = hit ? 1.0 : 0.0;
  out.exact = Rat(hit ? 1 : 0);
  return out;
}

}  // namespace

WalkRow walk_average(const RationalIfs& ifs, long n, WalkTest test, double eps,
                     const Word& alpha, long sample_cap, long samples,
                     std::uint64_t seed) {
  long base;
  if (!ifs.is_missing_digit(&base))
    throw DomainError("walk_average expects a missing-digit IFS");
  int d = ifs.dim();
  NormSpec norm = NormSpec::sup(d);
  SimilarityMap fa = ifs.compose_word(alpha);
  RatMat diag = RatMat::identity(d + 1);
  diag(d, d) = fa.rho;
  RatMat m_alpha = diag * u_matrix(fa.shift);
  Rat t_n = pow_rat(Rat(base), n);
  RatMat a_n = a_matrix_exact(d, t_n);

  WalkRow row;
  row.n = n;
  double total_words = std::pow(double(ifs.alphabet_size()), double(n));
  if (total_words <= double(sample_cap)) {
    row.mode = "enumerated";
    Rat exact_acc(0);
    double acc = 0;
    bool all_exact = true;
    Word w(n, 0);
    std::function<void(int)> rec = [&](int idx) {
      if (idx == n) {
        SimilarityMap fw = ifs.compose_word(w);
        RatMat total = a_n * u_matrix(fw.shift) * m_alpha;
        TermEval te = evaluate_walk_test(total, test, eps, norm);
        Rat lw = ifs.cylinder_measure(w);
        acc += to_d(lw) * te.value;
        if (te.exact) exact_acc += lw * *te.exact;
        else all_exact = false;
        return;
      }
      for (int i = 0; i < ifs.alphabet_size(); ++i) {
        w[idx] = i;
        rec(idx + 1);
      }
    };
    if (n == 0) {
      RatMat total = a_n * m_alpha;
      TermEval te = evaluate_walk_test(total, test, eps, norm);
      acc = te.value;
      if (te.exact) exact_acc = *te.exact; else all_exact = false;
    } else {
      rec(0);
    }
    row.value = all_exact ? to_d(exact_acc) : acc;
    if (all_exact) row.exact = exact_acc;
  } else {
    row.mode = "sampled";
    Rng rng(seed);
    double acc = 0;
    for (long s = 0; s < samples; ++s) {
      Word w;
      for (long i = 0; i < n; ++i)
        w.push_back(int(rng.next_below(ifs.alphabet_size())));
      SimilarityMap fw = ifs.compose_word(w);
      RatMat total = a_n * u_matrix(fw.shift) * m_alpha;
      acc += evaluate_walk_test(total, test, eps, norm).value;
    }
    row.value = acc / double(samples);
  }
  return row;
}

WalkRow rational_points_average(long p, long m, WalkTest test, double eps,
                                const RationalIfs& basepoint_ifs,
                                const Word& alpha, long cap) {
  if (m < 0) throw DomainError("rational_points_average: m must be >= 0");
  double count = std::pow(double(p), double(m));
  if (count > double(cap))
    throw DomainError("rational_points_average: p^m exceeds cap");
  int d = basepoint_ifs.dim();
  if (d != 1)
    throw DomainError("rational_points_average is implemented for d = 1");
  NormSpec norm = NormSpec::sup(d);
  SimilarityMap fa = basepoint_ifs.compose_word(alpha);
  RatMat diag = RatMat::identity(d + 1);
  diag(d, d) = fa.rho;
  RatMat m_alpha = diag * u_matrix(fa.shift);

  Rat pm = pow_rat(Rat(p), m);
  RatMat a_m = a_matrix_exact(d, pm);
  long total = 1;
  for (long i = 0; i < m; ++i) total *= p;

  Rat exact_acc(0);
  double acc = 0;
  bool all_exact = true;
  for (long k = 0; k < total; ++k) {
    RatMat mat = a_m * u_matrix({Rat(k) / pm}) * m_alpha;
    TermEval te = evaluate_walk_test(mat, test, eps, norm);
    acc += te.value;
    if (te.exact) exact_acc += *te.exact;
    else all_exact = false;
  }
  WalkRow row;
  row.n = m;
  row.mode = "enumerated";
  row.value = all_exact ? to_d(exact_acc / Rat(total)) : acc / double(total);
  if (all_exact) row.exact = exact_acc / Rat(total);
  return row;
}

}  // namespace fraclab
