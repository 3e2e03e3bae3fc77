#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"
#include "sparcs/common/rng.hpp"
#include "support/helpers.hpp"

using namespace sparcs;

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 12652.0, 1e-300, 6.02214076e23, -2.5}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(12652.0) == "12652");
}

TEST_CASE("write_file_atomic replaces content and leaves no temp file") {
  testutil::TempDir dir;
  const auto path = dir / "nested/out.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "nested/out.txt.tmp"));
}

TEST_CASE("read_file on a missing path is a data error") {
  CHECK_THROWS_AS(read_file("/nonexistent/definitely/missing"), DataError);
}

TEST_CASE("uniform_index stays in range and covers it") {
  Rng rng(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = uniform_index(rng, 7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("uniform01 and standard_normal moments") {
  Rng rng(11);
  double s = 0, s2 = 0, u = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
    const double x = uniform01(rng);
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    u += x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(u / n - 0.5) < 0.005);
}

TEST_CASE("shuffled_indices is a seeded permutation") {
  const auto a = shuffled_indices(1000, 5);
  const auto b = shuffled_indices(1000, 5);
  const auto c = shuffled_indices(1000, 6);
  CHECK(a == b);
  CHECK(a != c);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) REQUIRE(sorted[i] == i);
  CHECK(shuffled_indices(0, 1).empty());
}

TEST_CASE("seeded streams are pinned") {
  // mt19937_64 output is fixed by the standard; this guards the helpers.
  Rng rng(42);
  const auto first = uniform_index(rng, 1000000);
  Rng again(42);
  CHECK(uniform_index(again, 1000000) == first);
}
