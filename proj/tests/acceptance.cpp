// Acceptance suite: one pass/fail line per criterion, with wall-time caps.
// Run via ctest or directly; exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <vector>

#include "fraclab/borelcantelli.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/sarith.hpp"
#include "fraclab/spectral.hpp"

using namespace fraclab;

namespace {

int failures = 0;

struct Criterion {
  const char* name;
  double time_cap_s;
  std::function<bool(std::string&)> run;
};

void report(const Criterion& c) {
  std::string detail;
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = c.run(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  bool in_time = secs <= c.time_cap_s;
  bool pass = ok && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %s  (%.2f s / cap %.0f s)%s%s\n",
              pass ? "PASS" : "FAIL", c.name, secs, c.time_cap_s,
              detail.empty() ? "" : "  -- ", detail.c_str());
}

// ---------------------------------------------------------------- 1
bool exact_identity_suite(std::string& detail) {
  std::vector<RationalIfs> families;
  families.push_back(RationalIfs::missing_digit(3, {0, 2}));
  families.push_back(RationalIfs::missing_digit(5, {0, 1, 2, 3}));
  families.push_back(RationalIfs::missing_digit(7, {0, 1, 2, 3, 4, 5}));
  SimilarityMap f0{Rat(1, 2), RatMat::identity(1), {Rat(0)}};
  SimilarityMap f1{Rat(1, 4), RatMat::identity(1), {Rat(3, 4)}};
  families.push_back(RationalIfs(1, {f0, f1}, {Rat(1, 2), Rat(1, 2)}));

  Rng rng(20260810);
  long identities = 0;
  for (const auto& ifs : families) {
    std::function<bool(Word&)> sweep = [&](Word& w) -> bool {
      for (int rep = 0; rep < 20; ++rep) {
        RatVec x(ifs.dim());
        for (auto& c : x)
          c = make_rat(long(rng.next_below(2001)) - 1000,
                       1 + long(rng.next_below(100)));
        if (!verify_key_identity(ifs, w, x)) return false;
        ++identities;
      }
      if (static_cast<int>(w.size()) == 4) return true;
      for (int i = 0; i < ifs.alphabet_size(); ++i) {
        w.push_back(i);
        if (!sweep(w)) return false;
        w.pop_back();
      }
      return true;
    };
    Word w;
    if (!sweep(w)) {
      detail = "key identity failed";
      return false;
    }
    auto mem = lattice_membership_and_freeness(ifs, 5);
    if (!mem.all_members || !mem.injective) {
      detail = "membership/freeness failed";
      return false;
    }
  }
  detail = std::to_string(identities) + " identities verified";
  return true;
}

// ---------------------------------------------------------------- 2
bool spectral_gap_sum(std::string& detail) {
  for (long p : {3L, 5L}) {
    long alphabet = p - 1;
    for (long n = 1; n <= 5; ++n)
      for (long delta : {0L, 1L, 2L}) {
        auto gs = cantor_gap_sum(p, alphabet, n, delta, true);
        if (!gs.brute_force || !gs.verified) {
          detail = "mismatch at p=" + std::to_string(p) +
                   " n=" + std::to_string(n) + " delta=" + std::to_string(delta);
          return false;
        }
      }
  }
  auto pinned = cantor_gap_sum(3, 2, 2, 1, true);
  if (pinned.closed_form != Rat(5, 36)) {
    detail = "n=2,p=3,delta=1 value is not 5/36";
    return false;
  }
  detail = "closed form == enumeration on all 30 cases; pinned value 5/36";
  return true;
}

// ---------------------------------------------------------------- 3
bool constant_pipeline(std::string& detail) {
  auto sc0 = structural_constants(1, Rat(0));  // formal eps -> 0 limit
  if (sc0.kappa != Rat(25, 704)) {
    detail = "kappa limit is not 25/704";
    return false;
  }
  // convergence of the eps > 0 pipeline to the limit
  auto sc_small = structural_constants(1, Rat(1, Int("100000000000000")));
  if (std::fabs(to_d(sc_small.kappa) - 25.0 / 704) > 1e-12) {
    detail = "kappa(eps) does not approach 25/704";
    return false;
  }
  auto mt = threshold_main(sc0, Rat(3));
  if (mt.epsilon0 != Rat(25, 20416)) {
    detail = "epsilon0 limit is not 25/20416";
    return false;
  }
  if (mt.dimension_threshold != Rat(20416, 20441)) {
    detail = "uniform missing-digit threshold is not 20416/20441";
    return false;
  }
  if (std::fabs(to_d(mt.dimension_threshold) - 0.998777) > 1e-6) {
    detail = "threshold decimal display off";
    return false;
  }
  if (!(mt.dimension_threshold <= parse_rat("0.9992"))) {
    detail = "threshold exceeds the stated 0.9992";
    return false;
  }
  if (cantor_cutoffs(Rat(0)).dimension_cutoff != Rat(3247, 3872)) {
    detail = "Cantor cutoff is not 3247/3872";
    return false;
  }
  if (sl_order(1, 3, 1) != 24) {
    detail = "|SL_2(F_3)| != 24";
    return false;
  }
  detail = "kappa=25/704, eps0=25/20416, s*=20416/20441<=0.9992, "
           "cutoff=3247/3872, |SL2(F3)|=24";
  return true;
}

// ---------------------------------------------------------------- 4
bool transform_suite(std::string& detail) {
  std::vector<ApproxFunction> fams = {
      ApproxFunction::reciprocal(1),
      ApproxFunction::power(1, parse_rat("1.1")),
      ApproxFunction::log_power(1, 2.0),
  };
  for (const auto& psi : fams) {
    std::vector<double> ts;
    for (long n = 1; n <= 30; ++n) {
      auto prof = dyadic_profile(psi, n);
      if (std::fabs(r_of_t(psi, prof.t) - prof.r) > 1e-9) {
        detail = "dyadic_profile vs r_of_t disagree for " + psi.describe();
        return false;
      }
      ts.push_back(prof.t);
    }
    auto rep = growth_checks(psi, ts, 30);
    if (!rep.ok) {
      detail = "growth checks failed for " + psi.describe() + ": " +
               rep.violation;
      return false;
    }
  }
  auto recip = ApproxFunction::reciprocal(1);
  for (long n = 1; n <= 30; ++n)
    if (dyadic_profile(recip, n).r != 0.0) {
      detail = "psi = 1/q does not give r == 0 exactly";
      return false;
    }
  detail = "3 families x 30 dyadic times agree to 1e-9; r == 0 for 1/q";
  return true;
}

// ---------------------------------------------------------------- 5
bool lattice_oracle_equivalence(std::string& detail) {
  std::vector<ApproxFunction> fams = {ApproxFunction::reciprocal(1),
                                      ApproxFunction::power(1, parse_rat("1.1"))};
  long decisions = 0;
  for (const auto& psi : fams)
    for (int i = 0; i < 100; ++i) {
      Rat x(2 * i + 1, 201);
      for (long n = 1; n <= 12; ++n) {
        bool direct = an_star_test({x}, psi, n, AnStarMode::Direct).has_value();
        bool lattice = an_star_test({x}, psi, n, AnStarMode::Lattice).has_value();
        if (direct != lattice) {
          detail = "mode disagreement at x=" + rat_str(x) +
                   " n=" + std::to_string(n);
          return false;
        }
        ++decisions;
      }
    }

  NormSpec norm2 = NormSpec::sup(1);
  NormSpec norm3 = NormSpec::sup(2);
  Rng rng(7777);
  long checked = 0;
  while (checked < 50) {
    int n = 2 + int(rng.next_below(2));
    RatMat b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        b(i, j) = make_rat(long(rng.next_below(17)) - 8,
                           1 + long(rng.next_below(8)));
    if (b.det() == 0) continue;
    const NormSpec& norm = n == 2 ? norm2 : norm3;
    auto sv = shortest_vector(LatticeBasis{b, 1.0}, norm);
    long box = 10;
    for (const auto& c : sv.coeffs) {
      Int a = abs(c.get_num());
      if (a.fits_slong_p()) box = std::max(box, a.get_si());
    }
    // brute-force oracle over the coefficient cube
    Rat best(-1);
    std::vector<long> cc(n, 0);
    std::function<void(int, bool)> rec = [&](int idx, bool zero) {
      if (idx == n) {
        if (zero) return;
        RatVec cv(n);
        for (int i = 0; i < n; ++i) cv[i] = cc[i];
        Rat len = norm.norm_exact(b * cv);
        if (best < 0 || len < best) best = len;
        return;
      }
      for (long v = -box; v <= box; ++v) {
        cc[idx] = v;
        rec(idx + 1, zero && v == 0);
      }
    };
    rec(0, true);
    if (sv.length_unscaled != best) {
      detail = "shortest vector mismatch on random basis";
      return false;
    }
    ++checked;
  }
  detail = std::to_string(decisions) + " boolean agreements; 50 bases vs cube";
  return true;
}

// ---------------------------------------------------------------- 6
bool converse_borel_cantelli(std::string& detail) {
  BcConstants constants;
  constants.c_sharp = Rat(1) + Rat(1, Int("1000000000"));
  std::vector<std::pair<const char*, EventFamily>> families = {
      {"mu=1/2", EventFamily::constant(Rat(1, 2))},
      {"mu=1/n", EventFamily::harmonic()},
  };
  for (auto& [name, fam] : families) {
    auto rep = bc_verify_and_bound(fam, constants, 1, 500);
    for (const auto& h : rep.hypotheses)
      if (!h.holds) {
        detail = std::string(name) + ": hypothesis " + h.name + " failed";
        return false;
      }
    // exact separation inequalities of the sparse selection
    const auto& sel = rep.selection;
    std::vector<const SparseBlock*> chosen;
    for (const auto& blk : sel.blocks)
      if ((blk.k % 2 == 0) == sel.even_chosen) chosen.push_back(&blk);
    for (const auto* b1 : chosen)
      for (const auto* b2 : chosen) {
        if (b1->k >= b2->k) continue;
        for (long m = b1->first; m <= b1->last; ++m)
          for (long n = b2->first; n <= b2->last; ++n)
            if (!(Rat(n) >= sel.c_star_effective * Rat(m))) {
              detail = std::string(name) + ": C* separation violated";
              return false;
            }
      }
    for (const auto* blk : chosen)
      for (long n = blk->first; n <= blk->last; ++n)
        if (!(Rat(n) < (Rat(1) + constants.eps_star) * blk->q)) {
          detail = std::string(name) + ": (1+eps*) separation violated";
          return false;
        }
    if (!(to_d(rep.union_lower_bound) > 0.95)) {
      detail = std::string(name) + ": union bound " +
               std::to_string(to_d(rep.union_lower_bound)) + " <= 0.95";
      return false;
    }
  }
  detail = "mu=c and mu=1/n verified; union bounds > 0.95 at N=500";
  return true;
}

// ---------------------------------------------------------------- 7
bool statistical_equidistribution(std::string& detail) {
  ExperimentConfig cfg;
  cfg.ifs_spec = "missing:base=5,digits=0,1,2,3";
  cfg.psi_spec = "recip";
  cfg.samples = 100000;
  cfg.seed = 2026;
  cfg.threads = 8;
  cfg.ts = {5.0, 7.0};
  cfg.eps_list = {0.2, 0.3};
  auto rows = orbit_statistic(cfg);
  char buf[128];
  for (const auto& r : rows) {
    double lo = r.haar_lo * 0.85 - 3 * r.stderr_;
    double hi = r.haar_hi * 1.15 + 3 * r.stderr_;
    if (!(r.estimate >= lo && r.estimate <= hi)) {
      std::snprintf(buf, sizeof buf,
                    "t=%.0f eps=%.1f: %.4f outside [%.4f, %.4f]", r.t, r.eps,
                    r.estimate, lo, hi);
      detail = buf;
      return false;
    }
  }
  detail = "4 cells within the widened Haar bracket at N=1e5";
  return true;
}

// ---------------------------------------------------------------- 8
bool khintchine_dichotomy(std::string& detail) {
  ExperimentConfig cfg;
  cfg.ifs_spec = "missing:base=5,digits=0,1,2,3";
  cfg.samples = 10000;
  cfg.seed = 321;
  cfg.threads = 8;

  cfg.psi_spec = "power:e=3";
  cfg.lebesgue = true;
  cfg.n_lo = 15;
  cfg.n_hi = 25;
  double conv_hit = khintchine_scan(cfg).back().cum_hit;
  if (!(conv_hit < 0.05)) {
    detail = "convergent-case window hit fraction " + std::to_string(conv_hit);
    return false;
  }

  cfg.psi_spec = "recip";
  cfg.n_lo = 1;
  cfg.n_hi = 25;
  cfg.lebesgue = true;
  double div_leb = khintchine_scan(cfg).back().cum_hit;
  if (!(div_leb > 0.9)) {
    detail = "divergent Lebesgue hit fraction " + std::to_string(div_leb);
    return false;
  }
  cfg.lebesgue = false;
  double div_frac = khintchine_scan(cfg).back().cum_hit;
  if (!(div_frac > 0.5)) {
    detail = "divergent fractal hit fraction " + std::to_string(div_frac);
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "conv %.4f < 0.05; div leb %.3f, fractal %.3f",
                conv_hit, div_leb, div_frac);
  detail = buf;
  return true;
}

// ---------------------------------------------------------------- 9
bool simplex_sweep(std::string& detail) {
  Rng rng(5150);
  long done = 0;
  while (done < 500) {
    int d = 1 + int(rng.next_below(2));
    long n_den = 2 + long(rng.next_below(4));  // N in [2, 5]
    RatVec center(d);
    for (auto& c : center)
      c = make_rat(long(rng.next_below(4001)) - 2000, 1000);
    Rat fact(1);
    for (int i = 2; i <= d; ++i) fact *= i;
    Rat radius(1, 2);
    while (pow_rat(2 * radius, d) >=
           Rat(1) / (fact * pow_rat(Rat(n_den), d + 1)))
      radius /= 2;
    auto res = simplex_check(center, radius, n_den, d);
    if (!res.precondition_ok) continue;
    if (!res.hyperplane_found) {
      detail = "counterexample found (implementation bug)";
      return false;
    }
    // exact containment audit
    if (!res.points.empty()) {
      for (const auto& pt : res.points) {
        Rat dot(0);
        for (int i = 0; i < d; ++i) dot += res.hyperplane_normal[i] * pt[i];
        if (dot != res.hyperplane_offset) {
          detail = "hyperplane does not contain all points";
          return false;
        }
      }
    }
    ++done;
  }
  detail = "500 precondition-satisfying balls, zero counterexamples";
  return true;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"1 (exact identity suite)", 10, exact_identity_suite},
      {"2 (spectral-gap sum)", 5, spectral_gap_sum},
      {"3 (constant pipeline)", 5, constant_pipeline},
      {"4 (transform suite)", 2, transform_suite},
      {"5 (lattice oracle equivalence)", 60, lattice_oracle_equivalence},
      {"6 (converse Borel-Cantelli)", 30, converse_borel_cantelli},
      {"7 (statistical equidistribution)", 300, statistical_equidistribution},
      {"8 (Khintchine dichotomy trend)", 300, khintchine_dichotomy},
      {"9 (simplex lemma sweep)", 30, simplex_sweep},
  };
  for (const auto& c : criteria) report(c);
  if (failures) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all 9 acceptance criteria PASSED\n");
  return 0;
}
