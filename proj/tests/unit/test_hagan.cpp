#include <doctest.h>

#include <cmath>
#include <random>

#include "sabrnet/errors.hpp"
#include "sabrnet/hagan.hpp"

using namespace sabrnet;

namespace {
const SabrPoint kSmile{1.0, 1.0, 1.0, 0.2, 0.5, -0.8, 1.2};
}

TEST_SUITE("hagan") {
  TEST_CASE("zx ratio closed form and series") {
    CHECK(zx_ratio(0.0, 0.3) == 1.0);
    CHECK(zx_ratio(1.0, 0.0) == doctest::Approx(1.13459265710651).epsilon(1e-13));
    CHECK(zx_ratio(3.4969, -0.8) == doctest::Approx(2.23003268).epsilon(1e-8));
    // both branches track the second-order expansion around the switch
    for (double rho : {-0.9, -0.3, 0.0, 0.5, 0.9}) {
      for (double z : {0.999e-6, 1.001e-6, -0.999e-6, -1.001e-6}) {
        const double second = 1.0 - rho * z / 2 + (2.0 - 3.0 * rho * rho) * z * z / 12;
        CHECK(std::abs(zx_ratio(z, rho) - second) < 1e-11);
      }
      CHECK(zx_ratio(1e-7, rho) == doctest::Approx(1.0 - rho * 1e-7 / 2).epsilon(1e-15));
    }
  }

  TEST_CASE("off-the-money values (high precision reference)") {
    CHECK(hagan_vol(kSmile.with_strike(0.5)) == doctest::Approx(0.520732501532765).epsilon(1e-12));
    CHECK(hagan_vol(kSmile.with_strike(1.21)) == doctest::Approx(0.130448682548643).epsilon(1e-12));
    const HaganOptions den{HaganBracket::denominator};
    CHECK(hagan_vol(kSmile.with_strike(0.5), den) ==
          doctest::Approx(0.515551421842687).epsilon(1e-12));
    CHECK(hagan_vol(kSmile.with_strike(1.21), den) ==
          doctest::Approx(0.130349977402597).epsilon(1e-12));
  }

  TEST_CASE("at-the-money formula") {
    CHECK(hagan_atm(kSmile) == doctest::Approx(0.196243333333333).epsilon(1e-12));
    CHECK(hagan_vol(kSmile) == doctest::Approx(0.196243333333333).epsilon(1e-12));
    const SabrPoint normal{1.0, 0.02, 0.02, 0.01, 0.0, 0.0, 0.0};
    CHECK(hagan_atm(normal) == doctest::Approx(0.505208333333333).epsilon(1e-12));
  }

  TEST_CASE("atm continuity") {
    for (double eps : {1e-7, -1e-7}) {
      const double off = hagan_vol(kSmile.with_strike(1.0 + eps));
      CHECK(std::abs(off / hagan_atm(kSmile) - 1.0) < 1e-6);
    }
    // across the dispatch threshold
    for (double eps : {1.0000001e-8, -1.0000001e-8}) {
      const double off = hagan_vol(kSmile.with_strike(std::exp(eps)));
      CHECK(std::abs(off - hagan_atm(kSmile)) <= 1e-8);
    }
  }

  TEST_CASE("lognormal limit returns alpha") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const SabrPoint p{0.05 + 4.95 * u(rng), 0.01 + u(rng), 0.01 + 2 * u(rng), 0.05 + 0.5 * u(rng),
                        1.0, -0.9 + 1.8 * u(rng), 0.0};
      CHECK(std::abs(hagan_vol(p) - p.alpha) <= 1e-14);
    }
  }

  TEST_CASE("bracket placement only matters away from the money") {
    const HaganOptions den{HaganBracket::denominator};
    CHECK(hagan_vol(kSmile, den) == hagan_vol(kSmile));
    SabrPoint lognormal = kSmile.with_strike(1.4);
    lognormal.beta = 1.0;
    CHECK(hagan_vol(lognormal, den) == hagan_vol(lognormal));
  }

  TEST_CASE("bracket names") {
    CHECK(to_string(HaganBracket::denominator) == "denominator");
    CHECK(hagan_bracket_from_string("numerator") == HaganBracket::numerator);
    CHECK_THROWS_AS(hagan_bracket_from_string("middle"), ConfigError);
  }

  TEST_CASE("negative atm vol is rejected") {
    // 1 + T (rho nu alpha / 4 + (2 - 3 rho^2) nu^2 / 24) = 1 - 2 * 0.5929 < 0
    const SabrPoint p{2.0, 1.0, 1.0, 1.0, 1.0, -0.95, 2.0};
    CHECK_THROWS_AS(hagan_atm(p), NegativeVol);
    CHECK_THROWS_AS(hagan_vol(p), NegativeVol);
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(hagan_vol({1.0, 1.0, -1.0, 0.2, 0.5, 0.0, 0.3}), DomainError);
    CHECK_THROWS_AS(hagan_vol({1.0, 1.0, 1.0, 0.2, 1.5, 0.0, 0.3}), DomainError);
    CHECK_THROWS_AS(hagan_vol({1.0, 1.0, 1.0, 0.2, 0.5, 0.99, 0.3}), DomainError);
  }
}
