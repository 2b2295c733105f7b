#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sabrnet/errors.hpp"
#include "sabrnet/hagan.hpp"
#include "sabrnet/mc_engine.hpp"

using namespace sabrnet;

namespace {
const SabrPoint kSmile{1.0, 1.0, 1.0, 0.2, 0.5, -0.8, 1.2};

McConfig small(std::size_t paths = 8192) {
  McConfig c;
  c.paths = paths;
  return c;
}
}  // namespace

TEST_SUITE("mc_engine") {
  TEST_CASE("step count") {
    const McConfig c;
    CHECK(c.steps(7.0 / 365.0) == 10);
    CHECK(c.steps(0.25) == 13);
    CHECK(c.steps(1.0) == 50);
    CHECK(c.steps(5.0) == 250);
  }

  TEST_CASE("config validation") {
    McConfig c;
    c.paths = 999;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.paths = 1000;
    CHECK_NOTHROW(c.validate());
    c.steps_per_year = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(cv_vol_mode_from_string("atm"), ConfigError);
    CHECK(sigma_scheme_from_string("euler-strict") == SigmaScheme::euler_strict);
  }

  TEST_CASE("control vol modes") {
    McConfig c;
    const SabrPoint p{1.0, 0.04, 0.04, 0.03, 0.5, -0.2, 0.3};
    CHECK(c.sigma_bar(p) == 0.03);
    c.cv_vol_mode = CvVolMode::effective_atm;
    CHECK(c.sigma_bar(p) == doctest::Approx(0.15).epsilon(1e-14));
  }

  TEST_CASE("lognormal degenerate case is exact") {
    const SabrPoint p{2.0, 0.03, 0.03, 0.25, 1.0, -0.4, 0.0};
    const auto t = simulate_terminals(p, small(1000));
    for (double K : {0.02, 0.03, 0.045}) CHECK(std::abs(mc_implied_vol(t, K).sigma - 0.25) <= 1e-10);
  }

  TEST_CASE("normals bookkeeping") {
    const auto t = simulate_terminals(kSmile, small(5000));
    CHECK(t.steps == 50);
    CHECK(t.normals_drawn == 2ull * 5000 * 50);
    CHECK(t.fwd.size() == 5000);
  }

  TEST_CASE("independent of the worker count") {
    McConfig a = small(3 * McConfig::kBlockSize + 17);
    McConfig b = a;
    b.workers = 3;
    const auto ta = simulate_terminals(kSmile, a, 5);
    const auto tb = simulate_terminals(kSmile, b, 5);
    CHECK(ta.fwd == tb.fwd);
    CHECK(ta.black == tb.black);
    CHECK(cv_price(ta, 1.1).price == cv_price(tb, 1.1).price);
  }

  TEST_CASE("seed and config index select the stream") {
    const auto a = simulate_terminals(kSmile, small(), 0);
    const auto b = simulate_terminals(kSmile, small(), 1);
    McConfig other = small();
    other.base_seed = 43;
    const auto c = simulate_terminals(kSmile, other, 0);
    CHECK(a.fwd != b.fwd);
    CHECK(a.fwd != c.fwd);
    CHECK(a.fwd == simulate_terminals(kSmile, small(), 0).fwd);
  }

  TEST_CASE("forward is absorbed at zero") {
    const SabrPoint p{5.0, 0.01, 0.01, 0.05, 0.0, 0.0, 0.5};
    const auto t = simulate_terminals(p, small());
    CHECK(*std::min_element(t.fwd.begin(), t.fwd.end()) >= 0.0);
    CHECK(std::count(t.fwd.begin(), t.fwd.end(), 0.0) > 0);
  }

  TEST_CASE("euler-strict scheme stays usable") {
    McConfig c = small();
    c.sigma_scheme = SigmaScheme::euler_strict;
    const auto v = mc_implied_vol(kSmile, c);
    CHECK(v.sigma == doctest::Approx(0.195).epsilon(0.05));
  }

  TEST_CASE("control variate beats plain Monte Carlo in the money") {
    const auto t = simulate_terminals(kSmile, small(20000));
    for (double K : {0.6, 0.8}) CHECK(cv_price(t, K).std_error < plain_price(t, K).std_error);
    SabrPoint calm = kSmile;
    calm.nu = 0.3;
    const auto tc = simulate_terminals(calm, small(20000));
    for (double K : {0.6, 0.8, 1.0, 1.1})
      CHECK(cv_price(tc, K).std_error < 0.6 * plain_price(tc, K).std_error);
  }

  TEST_CASE("unit-coefficient control variate can add variance out of the money") {
    const auto t = simulate_terminals(kSmile, small(20000));
    CHECK(cv_price(t, 1.3).std_error > plain_price(t, 1.3).std_error);
  }

  TEST_CASE("cev cross-check against Hagan") {
    const SabrPoint p{1.0, 1.0, 1.0, 0.2, 0.5, 0.0, 0.0};
    const auto t = simulate_terminals(p, small(40000));
    for (double K : {0.9, 1.0, 1.1})
      CHECK(std::abs(mc_implied_vol(t, K).sigma - hagan_vol(p.with_strike(K))) < 0.005);
  }

  TEST_CASE("vol error is price error over vega") {
    const auto v = mc_implied_vol(kSmile, small(20000));
    CHECK(v.std_error > 0.0);
    CHECK(v.std_error < 0.01);
    CHECK(v.estimate.paths_used == 20000);
  }

  TEST_CASE("deep out-of-the-money strike fails cleanly") {
    const auto t = simulate_terminals(kSmile.with_strike(1.0), small(1000));
    CHECK_THROWS_AS(mc_implied_vol(t, 1e6), PriceOutOfBounds);
  }
}
