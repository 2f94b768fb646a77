#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fraclab/config.hpp"
#include "fraclab/csv.hpp"

using namespace fraclab;

TEST_CASE("minimal khintchine config parses") {
  const char* text =
      "subcommand = khintchine\n"
      "ifs = missing:base=5,digits=0,1,2,3\n"
      "psi = recip\n"
      "n_lo = 1\n"
      "n_hi = 20\n"
      "samples = 10000\n"
      "seed = 7\n";
  auto spec = parse_config_text(text);
  CHECK(spec.subcommand == "khintchine");
  CHECK(spec.cfg.samples == 10000);
  CHECK(spec.cfg.seed == 7);
  CHECK(spec.cfg.n_hi == 20);
}

TEST_CASE("unknown keys are errors with line numbers") {
  try {
    parse_config_text("samples = 500\nn_hii = 3\n");
    FAIL("expected error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("n_hii") != std::string::npos);
  }
}

TEST_CASE("negative sample count names the key") {
  try {
    parse_config_text("samples = -5\n");
    FAIL("expected error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("samples") != std::string::npos);
  }
}

TEST_CASE("rational literal rules") {
  // exact literals parse
  CHECK(parse_rat("2/3") == Rat(2, 3));
  CHECK(parse_rat("0.25") == Rat(1, 4));
  CHECK(parse_rat("-1.5") == Rat(-3, 2));
  // 0.666 is a valid decimal but not equal to 2/3: exactness is preserved
  CHECK(parse_rat("0.666") != Rat(2, 3));
  CHECK(parse_rat("0.666") == make_rat(666, 1000));
  // scientific notation is exact too
  CHECK(parse_rat("1e-6") == Rat(1, 1000000));
  CHECK(parse_rat("2.5e3") == Rat(2500));
  CHECK(parse_rat("-1E+2") == Rat(-100));
  CHECK_THROWS_AS(parse_rat("2/"), DomainError);
  CHECK_THROWS_AS(parse_rat("abc"), DomainError);
  CHECK_THROWS_AS(parse_rat(""), DomainError);
  CHECK_THROWS_AS(parse_rat("1.2.3"), DomainError);
  CHECK_THROWS_AS(parse_rat("1e"), DomainError);
  CHECK_THROWS_AS(parse_rat("1e4x"), DomainError);
}

TEST_CASE("round trip: serialize then re-parse is the identity") {
  const char* text =
      "subcommand = equidist\n"
      "ifs = missing:base=5,digits=0,1,2,3\n"
      "psi = power:tau=2\n"
      "n_lo = 2\n"
      "n_hi = 9\n"
      "t = 1.5,2.25\n"
      "eps = 0.2,0.3\n"
      "samples = 5000\n"
      "seed = 99\n"
      "threads = 2\n"
      "basepoint = 1,0\n"
      "depth = 48\n"
      "c_f = 1.0\n"
      "kappa_star = 0.05\n"
      "delta = 0.05\n"
      "c_prime_d = 0.0\n"
      "lebesgue = 0\n"
      "out = runs\n";
  auto spec = parse_config_text(text);
  auto text2 = spec.serialize();
  auto spec2 = parse_config_text(text2);
  CHECK(spec2.serialize() == text2);
  CHECK(spec2.cfg.ts == spec.cfg.ts);
  CHECK(spec2.cfg.eps_list == spec.cfg.eps_list);
  CHECK(spec2.cfg.basepoint_word == spec.cfg.basepoint_word);
  CHECK(spec2.cfg.seed == spec.cfg.seed);
  CHECK(spec2.out_dir == spec.out_dir);
}

TEST_CASE("csv writer emits header and metadata trailer") {
  CsvWriter csv({"a", "b"});
  csv.cell(1.5).cell(std::string("x"));
  csv.end_row();
  csv.cell(Rat(2, 3)).cell(std::string("y"));
  csv.end_row();
  auto out = csv.finish(77);
  CHECK(out.find("a,b\n") == 0);
  CHECK(out.find("2/3,y\n") != std::string::npos);
  CHECK(out.find("# seed=77 version=") != std::string::npos);
  // width mismatch is a logic error
  CsvWriter bad({"a", "b"});
  bad.cell(1.0);
  CHECK_THROWS_AS(bad.end_row(), std::logic_error);
}

TEST_CASE("doubles round-trip through the shortest representation") {
  for (double v : {0.1, 1.0 / 3.0, 2e-17, 123456.75, -0.052}) {
    auto s = CsvWriter::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}
