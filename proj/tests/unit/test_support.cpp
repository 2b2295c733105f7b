#include <doctest.h>

#include <cmath>
#include <limits>

#include "sabrnet/csv.hpp"
#include "sabrnet/errors.hpp"
#include "sabrnet/hash.hpp"
#include "sabrnet/parallel.hpp"

using namespace sabrnet;

TEST_SUITE("support") {
  TEST_CASE("sha256 known digests") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("csv formatting and parsing") {
    CHECK(csv::format12(0.1) == "0.1");
    CHECK(csv::format12(1.0 / 3.0) == "0.333333333333");
    CHECK(csv::format12(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(csv::format17(0.1) == "0.10000000000000001");
    CHECK(csv::parse_double("2.5e-3") == 0.0025);
    CHECK(std::isnan(csv::parse_double("nan")));
    CHECK(std::isinf(csv::parse_double("-inf")));
    CHECK_THROWS_AS(csv::parse_double("1.2x"), ConfigError);
    CHECK_THROWS_AS(csv::parse_double(""), ConfigError);
    const auto f = csv::split_line("a,b,,c\r");
    REQUIRE(f.size() == 4);
    CHECK(f[2].empty());
    CHECK(f[3] == "c");
  }

  TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(100, 3,
                                 [](std::size_t i) {
                                   if (i == 50) throw NonFinite("boom");
                                 }),
                    NonFinite);
  }
}
