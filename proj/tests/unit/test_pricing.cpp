#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sabrnet/errors.hpp"
#include "sabrnet/pricing.hpp"

using namespace sabrnet;

TEST_SUITE("pricing") {
  TEST_CASE("normal cdf reference values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-16));
    CHECK(normal_cdf(0.1) == doctest::Approx(0.539827837277029).epsilon(1e-14));
    CHECK(normal_cdf(-10.0) == doctest::Approx(7.61985302416047e-24).epsilon(1e-12));
    CHECK(normal_cdf(8.0) + normal_cdf(-8.0) == doctest::Approx(1.0).epsilon(1e-16));
  }

  TEST_CASE("black price at the money") {
    // F0 (N(0.1) - N(-0.1)) = 0.0796557...
    const double c = black_price({1.0, 1.0, 1.0, 0.2});
    CHECK(c == doctest::Approx(0.0796556745540577).epsilon(1e-13));
  }

  TEST_CASE("black price bounds and limits") {
    CHECK(black_price({1.0, 1.0, 0.8, 0.0}) == doctest::Approx(0.2));
    CHECK(black_price({1.0, 1.0, 1.2, 1e-12}) == 0.0);
    const double huge = black_price({1.0, 1.0, 1.0, 50.0});
    CHECK(huge <= 1.0);
    CHECK(huge > 0.99);
  }

  TEST_CASE("put-call parity via intrinsic bounds") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 1.5), s(0.05, 0.8);
    for (int i = 0; i < 200; ++i) {
      const BlackInputs in{u(rng), 1.0, u(rng), s(rng)};
      const double c = black_price(in);
      CHECK(c >= std::max(in.F0 - in.K, 0.0));
      CHECK(c <= in.F0);
    }
  }

  TEST_CASE("vega matches central difference") {
    const BlackInputs in{0.75, 0.03, 0.032, 0.25};
    const double h = 1e-6;
    const double fd = (black_price({in.T, in.F0, in.K, in.sigma + h}) -
                       black_price({in.T, in.F0, in.K, in.sigma - h})) / (2 * h);
    CHECK(black_vega(in) == doctest::Approx(fd).epsilon(1e-7));
  }

  TEST_CASE("implied vol round trip") {
    for (double K : {0.5, 0.9, 1.0, 1.1, 2.0})
      for (double sig : {0.05, 0.2, 0.8, 2.0}) {
        const double c = black_price({1.0, 1.0, K, sig});
        if (c - std::max(1.0 - K, 0.0) < 1e-12) continue;  // time value lost to rounding
        CHECK(implied_vol(c, 1.0, 1.0, K) == doctest::Approx(sig).epsilon(1e-9));
      }
  }

  TEST_CASE("implied vol expands the bracket beyond 5") {
    const double c = black_price({1.0, 1.0, 1.0, 7.0});
    CHECK(implied_vol(c, 1.0, 1.0, 1.0) == doctest::Approx(7.0).epsilon(1e-8));
  }

  TEST_CASE("implied vol rejects prices outside the no-arbitrage band") {
    CHECK_THROWS_AS(implied_vol(0.0, 1.0, 1.0, 1.0), PriceOutOfBounds);
    CHECK_THROWS_AS(implied_vol(1.0, 1.0, 1.0, 1.0), PriceOutOfBounds);
    CHECK_THROWS_AS(implied_vol(0.19, 1.0, 1.0, 0.8), PriceOutOfBounds);
    CHECK_THROWS_AS(implied_vol(-0.1, 1.0, 1.0, 1.0), PriceOutOfBounds);
  }

  TEST_CASE("invalid black inputs") {
    CHECK_THROWS_AS(black_price({0.0, 1.0, 1.0, 0.2}), DomainError);
    CHECK_THROWS_AS(black_price({1.0, -1.0, 1.0, 0.2}), DomainError);
    CHECK_THROWS_AS(black_price({1.0, 1.0, 1.0, -0.2}), DomainError);
    CHECK_THROWS_AS(black_price({1.0, 1.0, NAN, 0.2}), DomainError);
  }
}
