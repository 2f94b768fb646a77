// Command-line frontend: exact identity audits, constant tables, spectral-gap
// sums, and the Monte-Carlo experiments, all emitting CSV.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "fraclab/borelcantelli.hpp"
#include "fraclab/kv.hpp"
#include "fraclab/config.hpp"
#include "fraclab/csv.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/sarith.hpp"
#include "fraclab/spectral.hpp"

using namespace fraclab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 2;
constexpr int kExitHypothesisFailure = 3;
constexpr int kExitUsage = 64;

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

int cmd_constants(int d, const std::string& eps_str, const std::string& out_dir,
                  std::uint64_t seed) {
  Rat eps = parse_rat(eps_str);
  StructuralConstants sc = structural_constants(d, eps);
  MainThreshold mt = threshold_main(sc, Rat(3));
  CantorCutoffs cc = cantor_cutoffs(Rat(0));

  CsvWriter csv({"name", "value", "exact"});
  auto row = [&](const std::string& name, double v, const std::string& exact) {
    csv.cell(name).cell(v).cell(exact);
    csv.end_row();
  };
  row("ell", double(sc.ell), std::to_string(sc.ell));
  row("eps_d", to_d(sc.eps_d), rat_str(sc.eps_d));
  row("v_d", double(sc.v_d), std::to_string(sc.v_d));
  row("p", double(sc.p), std::to_string(sc.p));
  row("kappa_prime", to_d(sc.kappa_prime), rat_str(sc.kappa_prime));
  row("kappa", to_d(sc.kappa), rat_str(sc.kappa));
  row("q_eps", to_d(sc.q_eps), rat_str(sc.q_eps));
  row("epsilon0[L=3]", to_d(mt.epsilon0), rat_str(mt.epsilon0));
  row("dimension_threshold[L=3]", to_d(mt.dimension_threshold),
      rat_str(mt.dimension_threshold));
  row("cantor_cutoff[eps->0]", to_d(cc.dimension_cutoff),
      rat_str(cc.dimension_cutoff));
  row("sl2_f3_order", to_d(Rat(sl_order(1, 3, 1))), sl_order(1, 3, 1).get_str());
  std::string path = out_path(out_dir, "constants.csv");
  csv.write_file(path, seed);
  std::cout << csv.finish(seed);
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_check_hypothesis(const std::string& ifs_spec, const std::string& eps_str,
                         const std::string& out_dir, std::uint64_t seed) {
  RationalIfs ifs = RationalIfs::from_spec_string(ifs_spec);
  StructuralConstants sc = structural_constants(ifs.dim(), parse_rat(eps_str));
  GapHypothesis gh = gap_hypothesis(ifs, sc);
  CsvWriter csv({"name", "value"});
  csv.cell(std::string("gap_lhs")).cell(gh.gap_lhs); csv.end_row();
  csv.cell(std::string("kappa")).cell(gh.gap_kappa); csv.end_row();
  csv.cell(std::string("gap_margin")).cell(gh.gap_margin); csv.end_row();
  csv.cell(std::string("gap_holds")).cell(long(gh.gap_holds)); csv.end_row();
  csv.cell(std::string("thickness_lhs")).cell(gh.thickness_lhs); csv.end_row();
  csv.cell(std::string("epsilon0")).cell(gh.epsilon0); csv.end_row();
  csv.cell(std::string("thickness_holds")).cell(long(gh.thickness_holds));
  csv.end_row();
  std::string path = out_path(out_dir, "hypothesis.csv");
  csv.write_file(path, seed);
  std::cout << csv.finish(seed) << "wrote " << path << "\n";
  return gh.gap_holds ? kExitOk : kExitHypothesisFailure;
}

int cmd_gap_sum(long base, const std::string& digits_str, long n, long delta,
                bool brute, const std::string& out_dir, std::uint64_t seed) {
  auto digit_strs = split(digits_str, ',');
  long alphabet = static_cast<long>(digit_strs.size());
  CantorGapSum gs = cantor_gap_sum(base, alphabet, n, delta, brute);
  std::cout << "closed_form = " << rat_str(gs.closed_form) << "\n";
  if (gs.brute_force)
    std::cout << "brute_force = " << rat_str(*gs.brute_force) << "\n";
  else if (brute)
    std::cout << "brute_force = (skipped: pair count over cap)\n";
  CsvWriter csv({"quantity", "value"});
  csv.cell(std::string("closed_form")).cell(gs.closed_form); csv.end_row();
  if (gs.brute_force) {
    csv.cell(std::string("brute_force")).cell(*gs.brute_force); csv.end_row();
    csv.cell(std::string("equal")).cell(long(gs.verified)); csv.end_row();
  }
  csv.write_file(out_path(out_dir, "gap_sum.csv"), seed);
  if (brute && gs.brute_force && !gs.verified) {
    std::cout << "MISMATCH between closed form and enumeration\n";
    return kExitHypothesisFailure;
  }
  return kExitOk;
}

int cmd_identity_audit(const std::string& ifs_spec, int max_word,
                       std::uint64_t seed) {
  RationalIfs ifs = RationalIfs::from_spec_string(ifs_spec);
  Rng rng(seed);
  long checked = 0;
  std::function<bool(Word&, int)> rec = [&](Word& w, int depth) -> bool {
    RatVec x(ifs.dim());
    for (auto& c : x)
      c = make_rat(long(rng.next_below(201)) - 100, long(rng.next_below(50)) + 1);
    if (!verify_key_identity(ifs, w, x)) return false;
    ++checked;
    if (depth == max_word) return true;
    for (int i = 0; i < ifs.alphabet_size(); ++i) {
      w.push_back(i);
      if (!rec(w, depth + 1)) return false;
      w.pop_back();
    }
    return true;
  };
  Word w;
  bool ok = rec(w, 0);
  MembershipReport mem = lattice_membership_and_freeness(
      ifs, std::min(max_word, 5));
  if (ok && mem.all_members && mem.injective) {
    std::cout << "all identities verified (" << checked
              << " words), lattice membership and freeness hold\n";
    return kExitOk;
  }
  std::cout << "identity audit FAILED\n";
  return kExitHypothesisFailure;
}

int cmd_equidist(const RunSpec& spec, bool with_d1_quantiles) {
  auto rows = orbit_statistic(spec.cfg);
  CsvWriter csv({"t", "eps", "estimate", "stderr", "haar_lo", "haar_hi"});
  for (const auto& r : rows) {
    csv.cell(r.t).cell(r.eps).cell(r.estimate).cell(r.stderr_)
        .cell(r.haar_lo).cell(r.haar_hi);
    csv.end_row();
  }
  std::string path = out_path(spec.out_dir, "equidist.csv");
  csv.write_file(path, spec.cfg.seed);
  std::cout << csv.finish(spec.cfg.seed) << "wrote " << path << "\n";
  if (with_d1_quantiles) {
    auto qrows = d1_quantile_statistic(spec.cfg);
    CsvWriter qcsv({"t", "d1_q50", "d1_q90", "d1_q99"});
    for (const auto& r : qrows) {
      qcsv.cell(r.t).cell(r.q50).cell(r.q90).cell(r.q99);
      qcsv.end_row();
    }
    std::string qpath = out_path(spec.out_dir, "d1_quantiles.csv");
    qcsv.write_file(qpath, spec.cfg.seed);
    std::cout << "wrote " << qpath << "\n";
  }
  return kExitOk;
}

int cmd_khintchine(const RunSpec& spec) {
  auto rows = khintchine_scan(spec.cfg);
  CsvWriter csv({"n", "t_n", "r_tn", "mu_an_hat", "stderr", "bracket_lo",
                 "bracket_hi", "in_g0", "cum_hit"});
  for (const auto& r : rows) {
    csv.cell(r.n).cell(r.t_n).cell(r.r_tn).cell(r.mu_an_hat).cell(r.stderr_)
        .cell(r.bracket_lo).cell(r.bracket_hi).cell(long(r.in_g0))
        .cell(r.cum_hit);
    csv.end_row();
  }
  std::string path = out_path(spec.out_dir, "khintchine.csv");
  csv.write_file(path, spec.cfg.seed);
  std::cout << csv.finish(spec.cfg.seed) << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_walk(const RunSpec& spec, const std::string& test_name, double eps) {
  RationalIfs ifs = RationalIfs::from_spec_string(spec.cfg.ifs_spec);
  WalkTest test = test_name == "one" ? WalkTest::One
                 : test_name == "d1" ? WalkTest::D1
                                     : WalkTest::CuspIndicator;
  CsvWriter csv({"n", "value", "mode"});
  for (long n = spec.cfg.n_lo; n <= spec.cfg.n_hi; ++n) {
    WalkRow row = walk_average(ifs, n, test, eps, spec.cfg.basepoint_word,
                               10000000L, spec.cfg.samples, spec.cfg.seed);
    csv.cell(row.n).cell(row.value).cell(row.mode);
    csv.end_row();
  }
  std::string path = out_path(spec.out_dir, "walk.csv");
  csv.write_file(path, spec.cfg.seed);
  std::cout << csv.finish(spec.cfg.seed) << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_rational_avg(const RunSpec& spec, long p, const std::string& test_name,
                     double eps) {
  RationalIfs ifs = RationalIfs::from_spec_string(spec.cfg.ifs_spec);
  WalkTest test = test_name == "one" ? WalkTest::One
                 : test_name == "d1" ? WalkTest::D1
                                     : WalkTest::CuspIndicator;
  CsvWriter csv({"m", "value", "mode"});
  for (long m = spec.cfg.n_lo; m <= spec.cfg.n_hi; ++m) {
    WalkRow row = rational_points_average(p, m, test, eps, ifs,
                                          spec.cfg.basepoint_word);
    csv.cell(row.n).cell(row.value).cell(row.mode);
    csv.end_row();
  }
  std::string path = out_path(spec.out_dir, "rational_avg.csv");
  csv.write_file(path, spec.cfg.seed);
  std::cout << csv.finish(spec.cfg.seed) << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_bc_verify(const std::string& family_file, long n_hi,
                  const std::string& out_dir, std::uint64_t seed) {
  EventFamily fam = EventFamily::from_file(family_file);
  BcConstants constants;
  BcReport rep = bc_verify_and_bound(fam, constants, 1, n_hi);
  CsvWriter csv({"hypothesis", "range", "holds", "worst_pair", "margin"});
  for (const auto& h : rep.hypotheses) {
    csv.cell(h.name).cell("[1," + std::to_string(n_hi) + "]")
        .cell(long(h.holds)).cell(h.worst_pair.empty() ? "-" : h.worst_pair)
        .cell(h.margin);
    csv.end_row();
  }
  std::string path = out_path(out_dir, "bc_report.csv");
  csv.write_file(path, seed);
  std::cout << csv.finish(seed);
  std::cout << "union lower bound: " << rat_str(rep.union_lower_bound) << " ~ "
            << to_d(rep.union_lower_bound) << "\n";
  std::cout << "wrote " << path << "\n";
  return rep.all_hold ? kExitOk : kExitHypothesisFailure;
}

int cmd_simplex(int d, long n_den, long trials, std::uint64_t seed,
                const std::string& out_dir) {
  Rng rng(seed);
  long found = 0, counterexamples = 0, skipped = 0;
  for (long trial = 0; trial < trials; ++trial) {
    RatVec center(d);
    for (auto& c : center) c = make_rat(long(rng.next_below(2001)) - 1000, 1000);
    Rat fact(1);
    for (int i = 2; i <= d; ++i) fact *= i;
    // halve the radius until the volume precondition (2r)^d < 1/(d! N^{d+1})
    Rat radius(1, 2);
    while (pow_rat(2 * radius, d) >= Rat(1) / (fact * pow_rat(Rat(n_den), d + 1)))
      radius /= 2;
    SimplexResult res = simplex_check(center, radius, n_den, d);
    if (!res.precondition_ok) { ++skipped; continue; }
    if (res.hyperplane_found) ++found;
    else ++counterexamples;
  }
  CsvWriter csv({"quantity", "value"});
  csv.cell(std::string("trials")).cell(trials); csv.end_row();
  csv.cell(std::string("hyperplane_found")).cell(found); csv.end_row();
  csv.cell(std::string("counterexamples")).cell(counterexamples); csv.end_row();
  csv.cell(std::string("skipped")).cell(skipped); csv.end_row();
  csv.write_file(out_path(out_dir, "simplex.csv"), seed);
  std::cout << "hyperplane found in " << found << "/" << trials
            << " trials, counterexamples: " << counterexamples << "\n";
  return counterexamples == 0 ? kExitOk : kExitHypothesisFailure;
}

int cmd_profile(const std::string& psi_spec, int d, long n_hi,
                const std::string& out_dir, std::uint64_t seed) {
  ApproxFunction psi = ApproxFunction::from_spec_string(d, psi_spec);
  CsvWriter csv({"n", "t_n", "r_tn", "lambda", "L"});
  for (long n = 1; n <= n_hi; ++n) {
    DynamicalProfile p = dyadic_profile(psi, n);
    csv.cell(n).cell(p.t).cell(p.r).cell(p.lam).cell(p.L);
    csv.end_row();
  }
  std::string path = out_path(out_dir, "profile.csv");
  csv.write_file(path, seed);
  std::cout << csv.finish(seed) << "wrote " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: exact checks and experiments for Diophantine "
               "approximation on self-similar fractals"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master RNG seed");
  app.add_option("--threads", threads, "worker threads");

  // constants
  auto* c_const = app.add_subcommand("constants", "structural constant table");
  int cd = 1;
  std::string ceps = "1/1000000";
  c_const->add_option("--d", cd);
  c_const->add_option("--eps", ceps);

  // check-hypothesis
  auto* c_hyp = app.add_subcommand("check-hypothesis",
                                   "spectral-gap and thickness hypotheses");
  std::string hyp_ifs = "missing:base=5,digits=0,1,2,3";
  std::string hyp_eps = "1/1000000";
  c_hyp->add_option("--ifs", hyp_ifs);
  c_hyp->add_option("--eps", hyp_eps);

  // gap-sum
  auto* c_gap = app.add_subcommand("gap-sum", "Cantor spectral-gap sum");
  long gbase = 3, gn = 2, gdelta = 1;
  std::string gdigits = "0,2";
  bool gbrute = false;
  c_gap->add_option("--base", gbase);
  c_gap->add_option("--digits", gdigits);
  c_gap->add_option("--n", gn);
  c_gap->add_option("--delta", gdelta);
  c_gap->add_flag("--brute-force", gbrute);

  // identity-audit
  auto* c_id = app.add_subcommand("identity-audit", "exact conjugation audit");
  std::string id_ifs = "missing:base=3,digits=0,2";
  int id_max = 4;
  c_id->add_option("--ifs", id_ifs);
  c_id->add_option("--max-word", id_max);

  // experiments with config files
  auto add_config_opt = [](CLI::App* sub, std::string& path) {
    sub->add_option("--config", path, "run description file")->required();
  };
  auto* c_eq = app.add_subcommand("equidist", "orbit statistics vs Haar");
  std::string eq_cfg;
  bool eq_d1q = false;
  add_config_opt(c_eq, eq_cfg);
  c_eq->add_flag("--d1-quantiles", eq_d1q, "also emit d1 quantile table");

  auto* c_kh = app.add_subcommand("khintchine", "A_n^* scan");
  std::string kh_cfg;
  add_config_opt(c_kh, kh_cfg);

  auto* c_walk = app.add_subcommand("walk", "random-walk spherical averages");
  std::string walk_cfg, walk_test = "d1";
  double walk_eps = 0.5;
  add_config_opt(c_walk, walk_cfg);
  c_walk->add_option("--test", walk_test, "one|d1|cusp");
  c_walk->add_option("--eps", walk_eps);

  auto* c_ra = app.add_subcommand("rational-avg", "rational points averages");
  std::string ra_cfg, ra_test = "cusp";
  long ra_p = 3;
  double ra_eps = 0.5;
  add_config_opt(c_ra, ra_cfg);
  c_ra->add_option("--p", ra_p);
  c_ra->add_option("--test", ra_test, "one|d1|cusp");
  c_ra->add_option("--eps", ra_eps);

  auto* c_bc = app.add_subcommand("bc-verify", "converse Borel-Cantelli");
  std::string bc_file;
  long bc_n = 500;
  c_bc->add_option("--family", bc_file, "event family file")->required();
  c_bc->add_option("--n", bc_n);

  auto* c_sx = app.add_subcommand("simplex", "simplex lemma sweep");
  int sx_d = 2;
  long sx_n = 5, sx_trials = 500;
  c_sx->add_option("--d", sx_d);
  c_sx->add_option("--N", sx_n);
  c_sx->add_option("--trials", sx_trials);

  auto* c_pr = app.add_subcommand("profile", "dynamical profile table");
  std::string pr_psi = "recip";
  int pr_d = 1;
  long pr_n = 20;
  c_pr->add_option("--psi", pr_psi);
  c_pr->add_option("--d", pr_d);
  c_pr->add_option("--n", pr_n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_const) return cmd_constants(cd, ceps, out_dir, seed);
    if (*c_hyp) return cmd_check_hypothesis(hyp_ifs, hyp_eps, out_dir, seed);
    if (*c_gap)
      return cmd_gap_sum(gbase, gdigits, gn, gdelta, gbrute, out_dir, seed);
    if (*c_id) return cmd_identity_audit(id_ifs, id_max, seed);
    if (*c_eq || *c_kh || *c_walk || *c_ra) {
      std::string cfg_path = *c_eq ? eq_cfg : *c_kh ? kh_cfg
                                  : *c_walk ? walk_cfg : ra_cfg;
      RunSpec spec = parse_config(cfg_path);
      spec.out_dir = out_dir;
      if (seed != 1) spec.cfg.seed = seed;
      if (threads != 1) spec.cfg.threads = threads;
      if (*c_eq) return cmd_equidist(spec, eq_d1q);
      if (*c_kh) return cmd_khintchine(spec);
      if (*c_walk) return cmd_walk(spec, walk_test, walk_eps);
      return cmd_rational_avg(spec, ra_p, ra_test, ra_eps);
    }
    if (*c_bc) return cmd_bc_verify(bc_file, bc_n, out_dir, seed);
    if (*c_sx) return cmd_simplex(sx_d, sx_n, sx_trials, seed, out_dir);
    if (*c_pr) return cmd_profile(pr_psi, pr_d, pr_n, out_dir, seed);
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsage;
}
