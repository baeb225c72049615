#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "mmio/common.hpp"
#include "mmio/mmspec.hpp"

using namespace mmio;

#ifndef MMIO_DATA_DIR
#define MMIO_DATA_DIR "data"
#endif

TEST_CASE("built-in spec validates and matches the bundled file") {
  const MmSpec& s = strassen_2x7_spec();
  REQUIRE_NOTHROW(validate_mmspec(s));
  CHECK(s.n0 == 2);
  CHECK(s.m0 == 7);

  std::ifstream in(std::string(MMIO_DATA_DIR) + "/strassen_2_7.json");
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  const MmSpec file = load_mmspec(Json::parse(ss.str()));
  REQUIRE_NOTHROW(validate_mmspec(file));
  CHECK(file.n0 == s.n0);
  CHECK(file.m0 == s.m0);
  CHECK(file.encA == s.encA);
  CHECK(file.encB == s.encB);
  CHECK(file.dec == s.dec);
}

TEST_CASE("pass-through rows are detected") {
  const MmSpec& s = strassen_2x7_spec();
  // Side A: rows 3 and 4 are pass-throughs (A11, A22).
  CHECK(s.pass_input('A', 3) == 0);
  CHECK(s.pass_input('A', 4) == 3);
  CHECK(s.pass_input('A', 1) == -1);  // A11 + A22
  // Side B: rows 2 and 5 are pass-throughs (B11, B22).
  CHECK(s.pass_input('B', 2) == 0);
  CHECK(s.pass_input('B', 5) == 3);
  CHECK(s.row_nontrivial('A', 1));
  CHECK_FALSE(s.row_nontrivial('A', 3));
  CHECK(s.lowest_nontrivial_row('A') == 1);
  CHECK(s.lowest_nontrivial_row('B') == 1);
}

TEST_CASE("a coefficient of -1 alone is not a pass-through") {
  MmSpec s = strassen_2x7_spec();
  s.encA[2] = {-1, 0, 0, 0};
  CHECK(s.pass_input('A', 3) == -1);
}

TEST_CASE("validation rejects malformed specs") {
  {  // all-zero row
    MmSpec s = strassen_2x7_spec();
    s.encA[2] = {0, 0, 0, 0};
    CHECK_THROWS_WITH(validate_mmspec(s), Catch::Matchers::ContainsSubstring("all-zero"));
  }
  {  // duplicate rows: one combination reused by two products
    MmSpec s = strassen_2x7_spec();
    s.encB[4] = s.encB[1];
    CHECK_THROWS_WITH(validate_mmspec(s), Catch::Matchers::ContainsSubstring("combination reused"));
  }
  {  // wrong row count
    MmSpec s = strassen_2x7_spec();
    s.encA.pop_back();
    CHECK_THROWS_AS(validate_mmspec(s), std::invalid_argument);
  }
  {  // wrong width
    MmSpec s = strassen_2x7_spec();
    s.dec[0].pop_back();
    CHECK_THROWS_AS(validate_mmspec(s), std::invalid_argument);
  }
  {  // coefficients that do not multiply matrices
    MmSpec s = strassen_2x7_spec();
    s.dec[1] = {1, 0, 1, 0, 1, 0, 0};
    CHECK_THROWS_WITH(validate_mmspec(s), Catch::Matchers::ContainsSubstring("field check"));
  }
  {  // n0 too small
    MmSpec s = strassen_2x7_spec();
    s.n0 = 1;
    CHECK_THROWS_AS(validate_mmspec(s), std::invalid_argument);
  }
}

TEST_CASE("apply_mmspec multiplies 2x2 matrices mod p") {
  const MmSpec& s = strassen_2x7_spec();
  const std::vector<int64_t> a = {1, 2, 3, 4};
  const std::vector<int64_t> b = {5, 6, 7, 8};
  const std::vector<int64_t> c = apply_mmspec(s, a, b, kFieldPrime);
  CHECK(c == std::vector<int64_t>{19, 22, 43, 50});
}

TEST_CASE("mmspec JSON round-trip") {
  const MmSpec& s = strassen_2x7_spec();
  const MmSpec t = load_mmspec(to_json(s));
  CHECK(t.n0 == s.n0);
  CHECK(t.m0 == s.m0);
  CHECK(t.encA == s.encA);
  CHECK(t.encB == s.encB);
  CHECK(t.dec == s.dec);
  CHECK(t.name == s.name);

  Json bad = to_json(s);
  bad["schema"] = "mmspec/9";
  CHECK_THROWS_AS(load_mmspec(bad), std::invalid_argument);
  Json missing = to_json(s);
  missing.erase("dec");
  CHECK_THROWS_AS(load_mmspec(missing), std::invalid_argument);
}
