#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fraclab/sarith.hpp"

using namespace fraclab;

namespace {

RationalIfs base3() { return RationalIfs::missing_digit(3, {0, 2}); }

RationalIfs mixed_ratio() {
  SimilarityMap f0{Rat(1, 2), RatMat::identity(1), {Rat(0)}};
  SimilarityMap f1{Rat(1, 4), RatMat::identity(1), {Rat(3, 4)}};
  return RationalIfs(1, {f0, f1}, {Rat(1, 2), Rat(1, 2)});
}

// Independent KAK oracle for 2x2 matrices: the constructive pivoting of the
// p-adic KAK decomposition. Scale so the maximal entry is a unit, pivot it
// to the corner with GL_2(Z_p) moves, and read off the two valuations.
KakExponents kak_2x2_oracle(const RatMat& m, long p) {
  auto val = [&](const Rat& x) { return padic_valuation(x, p); };
  // normalize: multiply by p^{-minval} so min valuation is 0
  long minv = 0;
  bool first = true;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (m(i, j) == 0) continue;
      long v = val(m(i, j));
      if (first || v < minv) minv = v;
      first = false;
    }
  RatMat a = m * pow_rat(Rat(p), -minv);
  // Move a minimal-valuation (unit) entry to position (0,0) using signed
  // permutations / unipotents in GL_2(Z_p).
  auto entry_val = [&](int i, int j) {
    return a(i, j) == 0 ? std::numeric_limits<long>::max() : val(a(i, j));
  };
  if (entry_val(1, 1) == 0 && entry_val(0, 0) != 0) {
    std::swap(a(0, 0), a(1, 1));
    std::swap(a(0, 1), a(1, 0));
  } else if (entry_val(0, 1) == 0 && entry_val(0, 0) != 0) {
    // column add: col0 += col1
    a(0, 0) += a(0, 1);
    a(1, 0) += a(1, 1);
  } else if (entry_val(1, 0) == 0 && entry_val(0, 0) != 0) {
    a(0, 0) += a(1, 0);
    a(0, 1) += a(1, 1);
  }
  REQUIRE(val(a(0, 0)) == 0);
  // clear the rest of row/column with Z_p-unipotents
  Rat f10 = a(1, 0) == 0 ? Rat(0) : a(1, 0) / a(0, 0);
  a(1, 0) -= f10 * a(0, 0);
  a(1, 1) -= f10 * a(0, 1);
  Rat f01 = a(0, 1) == 0 ? Rat(0) : a(0, 1) / a(0, 0);
  a(0, 1) -= f01 * a(0, 0);
  a(1, 1) -= f01 * a(1, 0);
  long v0 = 0, v1 = val(a(1, 1));
  long top = std::max(v0, v1) - std::min(v0, v1);
  return KakExponents{{top, 0}};
}

}  // namespace

TEST_CASE("p-adic norms") {
  CHECK(padic_norm(Rat(1, 9), 3) == PPower{2, false});
  CHECK(padic_norm(Rat(12), 2) == PPower{-2, false});
  CHECK(padic_norm(Rat(0), 5).infinite);
  CHECK_THROWS_AS(padic_norm(Rat(1), 4), DomainError);

  RatMat m(2, 2, {Rat(1, 3), Rat(-2, 3), Rat(0), Rat(1)});
  CHECK(padic_norm(m, 3) == PPower{1, false});
  CHECK(padic_norm(m, 3).value(3) == 3.0);
}

TEST_CASE("KAK exponents via Smith form") {
  CHECK(kak_exponents(RatMat::identity(2), 5).exps == std::vector<long>{0, 0});
  RatMat diag(2, 2, {Rat(1, 9), Rat(0), Rat(0), Rat(1)});
  CHECK(kak_exponents(diag, 3).exps == std::vector<long>{2, 0});
  RatMat m(2, 2, {Rat(1, 3), Rat(-2, 3), Rat(0), Rat(1)});
  CHECK(kak_exponents(m, 3).exps == std::vector<long>{1, 0});
  CHECK_THROWS_AS(kak_exponents(RatMat(2, 2), 3), DomainError);
}

TEST_CASE("KAK matches the 2x2 pivoting oracle on random matrices") {
  Rng rng(2024);
  for (long p : {2L, 3L, 5L}) {
    for (int trial = 0; trial < 200; ++trial) {
      RatMat m(2, 2);
      do {
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            m(i, j) = make_rat(long(rng.next_below(41)) - 20,
                          1 + long(rng.next_below(18)));
      } while (m.det() == 0);
      CHECK(kak_exponents(m, p) == kak_2x2_oracle(m, p));
    }
  }
}

TEST_CASE("KAK invariance under integral unimodular factors") {
  Rng rng(99);
  for (long p : {2L, 3L}) {
    for (int trial = 0; trial < 100; ++trial) {
      RatMat m(2, 2);
      do {
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            m(i, j) = make_rat(long(rng.next_below(31)) - 15,
                          1 + long(rng.next_below(9)));
      } while (m.det() == 0);
      // k in GL_2(Z) with det +-1 is a Z_p-unit matrix for every p
      long a = long(rng.next_below(5)) - 2;
      RatMat k1(2, 2, {Rat(1), Rat(a), Rat(0), Rat(1)});
      RatMat k2(2, 2, {Rat(1), Rat(0), Rat(long(rng.next_below(5)) - 2), Rat(1)});
      CHECK(kak_exponents(k1 * m * k2, p) == kak_exponents(m, p));
    }
  }
}

TEST_CASE("adjoint norms") {
  RatMat diag(2, 2, {Rat(1, 9), Rat(0), Rat(0), Rat(1)});
  CHECK(adjoint_norm_p(diag, 3).value(3) == 9.0);

  // u(x) with |x|_3 = 9: norm is |x|_p^2 = 81
  RatMat u(2, 2, {Rat(1), Rat(1, 9), Rat(0), Rat(1)});
  CHECK(adjoint_norm_p(u, 3).value(3) == 81.0);

  CHECK(adjoint_norm_p(RatMat::identity(3), 7).value(7) == 1.0);
  CHECK(adjoint_norm_inf(RatMat::identity(2)) == doctest::Approx(1.0));

  // Archimedean: Ad_{diag(t,1)} on trace-zero 2x2 has eigenvalues t, 1/t, 1.
  RatMat a(2, 2, {Rat(4), Rat(0), Rat(0), Rat(1)});
  CHECK(adjoint_norm_inf(a) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("adjoint norm symmetry and submultiplicativity") {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    RatMat m(2, 2), n(2, 2);
    do {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          m(i, j) = make_rat(long(rng.next_below(21)) - 10, 1 + long(rng.next_below(6)));
          n(i, j) = make_rat(long(rng.next_below(21)) - 10, 1 + long(rng.next_below(6)));
        }
    } while (m.det() == 0 || n.det() == 0);
    for (long p : {2L, 3L, 5L}) {
      CHECK(adjoint_norm_p(m, p).exp == adjoint_norm_p(m.inverse(), p).exp);
      CHECK(adjoint_norm_p(m * n, p).exp <=
            adjoint_norm_p(m, p).exp + adjoint_norm_p(n, p).exp);
    }
  }
}

TEST_CASE("gamma elements of the base-3 IFS") {
  auto ifs = base3();
  SUBCASE("empty word is the identity") {
    SElement g = gamma_element(ifs, {});
    CHECK(g == SElement::identity(2, ifs.primes()));
  }
  SUBCASE("digit 2") {
    SElement g = gamma_element(ifs, {1});
    CHECK(projectively_equal(g.arch(),
                             RatMat(2, 2, {Rat(1, 3), Rat(0), Rat(0), Rat(1)})));
    CHECK(projectively_equal(
        g.fin(), RatMat(2, 2, {Rat(1, 3), Rat(-2, 3), Rat(0), Rat(1)})));
  }
  SUBCASE("digit 2 squared") {
    SElement g = gamma_element(ifs, {1, 1});
    CHECK(projectively_equal(
        g.fin(), RatMat(2, 2, {Rat(1, 9), Rat(-8, 9), Rat(0), Rat(1)})));
  }
}

TEST_CASE("gamma multiplicativity") {
  auto check_ifs = [](const RationalIfs& ifs) {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      int lv = int(rng.next_below(5)), lw = int(rng.next_below(4));
      if (lv + lw > 8) continue;
      Word v, w;
      for (int i = 0; i < lv; ++i)
        v.push_back(int(rng.next_below(ifs.alphabet_size())));
      for (int i = 0; i < lw; ++i)
        w.push_back(int(rng.next_below(ifs.alphabet_size())));
      Word vw = v;
      vw.insert(vw.end(), w.begin(), w.end());
      CHECK(gamma_element(ifs, vw) ==
            gamma_element(ifs, v) * gamma_element(ifs, w));
    }
  };
  check_ifs(base3());
  check_ifs(RationalIfs::missing_digit(5, {0, 1, 3}));
  check_ifs(mixed_ratio());
}

TEST_CASE("key conjugation identity") {
  auto ifs = base3();
  SUBCASE("empty word") {
    CHECK(verify_key_identity(ifs, {}, {Rat(2, 7)}));
  }
  SUBCASE("digit 2 at x = 1/5") {
    CHECK(verify_key_identity(ifs, {1}, {Rat(1, 5)}));
  }
  SUBCASE("base-5 word (3,1) at x = 0") {
    auto ifs5 = RationalIfs::missing_digit(5, {0, 1, 2, 3, 4});
    CHECK(verify_key_identity(ifs5, {3, 1}, {Rat(0)}));
  }
  SUBCASE("random sweep: 1000 cases across IFS, words, points") {
    std::vector<RationalIfs> families = {
        base3(), RationalIfs::missing_digit(5, {0, 2, 3}), mixed_ratio()};
    Rng rng(77);
    int cases = 0;
    while (cases < 1000) {
      const auto& ifs_r = families[rng.next_below(families.size())];
      Word w;
      int len = int(rng.next_below(5));
      for (int i = 0; i < len; ++i)
        w.push_back(int(rng.next_below(ifs_r.alphabet_size())));
      RatVec x(ifs_r.dim());
      for (auto& c : x)
        c = make_rat(long(rng.next_below(101)) - 50, 1 + long(rng.next_below(50)));
      CHECK(verify_key_identity(ifs_r, w, x));
      ++cases;
    }
  }
}

TEST_CASE("lattice membership and freeness") {
  SUBCASE("base-3 digit 2 representative") {
    auto ifs = base3();
    RatMat gt = gamma_tilde(ifs, {1});
    CHECK(gt == RatMat(2, 2, {Rat(1), Rat(-2), Rat(0), Rat(3)}));
    CHECK(in_gamma_s(gt, ifs.primes()));
    CHECK_FALSE(in_gamma_s(gt, {2}));  // det 3 is not a {2}-unit
  }
  SUBCASE("missing-digit base 5 depth 3 injectivity") {
    auto ifs = RationalIfs::missing_digit(5, {0, 1, 2, 3});
    auto rep = lattice_membership_and_freeness(ifs, 3);
    CHECK(rep.all_members);
    CHECK(rep.injective);
    CHECK(rep.words_checked == 4 + 16 + 64);
  }
  SUBCASE("duplicated maps break injectivity") {
    SimilarityMap f{Rat(1, 3), RatMat::identity(1), {Rat(0)}};
    RationalIfs dup(1, {f, f}, {Rat(1, 2), Rat(1, 2)});
    auto rep = lattice_membership_and_freeness(dup, 2);
    CHECK_FALSE(rep.injective);
    CHECK(rep.collision.has_value());
  }
}

TEST_CASE("gamma norm law for missing-digit IFS") {
  // prod_p |gamma_w|_p <= q^{|w|}, exact p-powers
  for (long q : {3L, 10L}) {
    std::vector<long> digits = q == 3 ? std::vector<long>{0, 2}
                                      : std::vector<long>{0, 3, 9};
    auto ifs = RationalIfs::missing_digit(q, digits);
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
      int len = 1 + int(rng.next_below(5));
      Word w;
      for (int i = 0; i < len; ++i)
        w.push_back(int(rng.next_below(ifs.alphabet_size())));
      SElement g = gamma_element(ifs, w);
      Rat prod(1);
      for (long p : ifs.primes())
        prod *= pow_rat(Rat(p), adjoint_norm_p(g.fin(), p).exp);
      CHECK(prod <= pow_rat(Rat(q), len));
    }
  }
}

TEST_CASE("index bounds and SL orders") {
  CHECK(sl_order(1, 3, 1) == 24);
  CHECK(sl_order(1, 2, 1) == 6);
  CHECK(sl_order(1, 3, 0) == 1);
  // |SL_2(F_p)| = p(p^2-1)
  CHECK(sl_order(1, 7, 1) == 336);
  // |SL_3(F_2)| = 168
  CHECK(sl_order(2, 2, 1) == 168);
  CHECK_THROWS_AS(sl_order(1, 3, -1), DomainError);
  CHECK_THROWS_AS(sl_order(1, 4, 1), DomainError);

  auto ifs = base3();
  IndexBound ib = index_bound(ifs, {}, 2);
  CHECK(ib.missing_digit_path);
  CHECK(ib.a_const == 6);
  CHECK(ib.l_const == 3);
  CHECK(ib.factor == doctest::Approx(729.0));

  // general-path constants exist and are positive for mixed ratios
  IndexBound general = index_bound(mixed_ratio(), {}, 1);
  CHECK_FALSE(general.missing_digit_path);
  CHECK(general.l_const > 0);
  CHECK(general.a_const > 0);
}

TEST_CASE("shell sums and the modular character") {
  SUBCASE("n = 0") {
    auto s = shell_and_modular(5, 0, 2);
    CHECK(s.sum == 1);
    CHECK(s.bracket_lo == 1);
    CHECK(s.bracket_hi == 1);
  }
  SUBCASE("d = 1 collapses to a single tuple") {
    for (long n = 1; n <= 6; ++n) {
      auto s = shell_and_modular(3, n, 1);
      CHECK(s.tuple_count == 1);
      CHECK(s.sum == pow_rat(Rat(3), n));
      CHECK(s.bracket_lo == s.sum);
      CHECK(s.bracket_hi == s.sum);
    }
  }
  SUBCASE("d = 2, n = 1: tuples (1,0) and (1,1), both contribute p^2") {
    for (long p : {2L, 3L, 5L}) {
      auto s = shell_and_modular(p, 1, 2);
      CHECK(s.tuple_count == 2);
      CHECK(s.values == std::vector<Rat>{Rat(p * p), Rat(p * p)});
      CHECK(s.sum == Rat(2 * p * p));
      CHECK(s.bracket_lo == Rat(p * p));
      CHECK(s.bracket_hi == Rat(2 * p * p));
    }
  }
  SUBCASE("sum lies in its bracket for p in {2,3,5}, n <= 6, d <= 3") {
    for (long p : {2L, 3L, 5L})
      for (int d = 1; d <= 3; ++d)
        for (long n = 0; n <= 6; ++n) {
          auto s = shell_and_modular(p, n, d);
          CHECK(s.sum >= s.bracket_lo);
          CHECK(s.sum <= s.bracket_hi);
        }
  }
}

TEST_CASE("gamma serialization") {
  auto ifs = base3();
  SElement g = gamma_element(ifs, {1});
  // two row-major rational matrices separated by ';'
  std::string s = g.serialize();
  CHECK(s == "1,0,0,3;1,-2,0,3");
  // equality is projective, so the serialization is canonical per class
  SElement scaled(g.arch() * Rat(-5, 7), g.fin() * Rat(2), ifs.primes());
  CHECK(scaled.serialize() == s);
}

TEST_CASE("projective normalization") {
  RatMat m(2, 2, {Rat(-1, 3), Rat(2, 3), Rat(0), Rat(-1)});
  RatMat n = projective_normalize(m);
  CHECK(n == RatMat(2, 2, {Rat(1), Rat(-2), Rat(0), Rat(3)}));
  CHECK(projectively_equal(m, m * Rat(-7, 5)));
}
