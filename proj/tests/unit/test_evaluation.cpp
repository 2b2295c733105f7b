#include <doctest.h>

#include <cmath>

#include "sabrnet/errors.hpp"
#include "sabrnet/evaluation.hpp"
#include "sabrnet/nn/model.hpp"

using namespace sabrnet;

namespace {

nn::ModelBundle zero_residual(nn::Arch a = nn::Arch::georesnn) {
  auto b = nn::make_bundle(a, 1);
  for (auto t : b.net.parameters()) std::fill(t.begin(), t.end(), 0.0);
  return b;
}

Sample row(double n, double mc, double K = 1.0) {
  Sample s;
  s.n = n;
  s.sigma_mc = mc;
  s.x.K = K;
  s.x.F0 = 1.0;
  return s;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("r2 examples") {
    const std::vector<double> ref{1, 2, 3};
    CHECK(r2(ref, ref) == 1.0);
    CHECK(r2(std::vector<double>{2, 2, 2}, ref) == 0.0);
    CHECK(r2(std::vector<double>{1, 2, 4}, ref) == doctest::Approx(0.5));
    CHECK(r2(std::vector<double>{11, 12, 14}, std::vector<double>{11, 12, 13}) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(r2(ref, std::vector<double>{1, 1, 1}), DegenerateReference);
    CHECK_THROWS_AS(r2(ref, std::vector<double>{1, 2}), ShapeMismatch);
  }

  TEST_CASE("relative rmse") {
    CHECK(rmse_rel(std::vector<double>{1.1, 0.9}, std::vector<double>{1.0, 1.0}) ==
          doctest::Approx(0.1));
    CHECK(rmse_rel(std::vector<double>{2.0}, std::vector<double>{2.0}) == 0.0);
  }

  TEST_CASE("regions by grid sign and by moneyness") {
    CHECK(region_of(row(-0.5, 0.2), RegionRule::grid_sign) == Region::itm);
    CHECK(region_of(row(0.0, 0.2), RegionRule::grid_sign) == Region::atm);
    CHECK(region_of(row(2.5, 0.2), RegionRule::grid_sign) == Region::otm);
    CHECK(region_of(row(2.5, 0.2, 1.01), RegionRule::literal_moneyness) == Region::atm);
    CHECK(region_of(row(-2.5, 0.2, 0.95), RegionRule::literal_moneyness) == Region::itm);
    CHECK(region_of(row(2.5, 0.2, 1.05), RegionRule::literal_moneyness) == Region::otm);
  }

  TEST_CASE("regional metrics") {
    std::vector<Sample> rows;
    for (double n : {-1.0, -0.5, 0.0, 0.0, 0.5, 1.0}) rows.push_back(row(n, 0.2 + 0.01 * n + 0.001 * n * n));
    rows[3].sigma_mc = 0.21;
    std::vector<double> perfect;
    for (const auto& r : rows) perfect.push_back(r.sigma_mc);
    const auto rep = regional_metrics(rows, perfect);
    CHECK(rep.itm.r2 == 1.0);
    CHECK(rep.atm.r2 == 1.0);
    CHECK(rep.otm.r2 == 1.0);
    CHECK(rep.itm.count + rep.atm.count + rep.otm.count == rows.size());

    const std::vector<Sample> only_atm{row(0.0, 0.2), row(0.0, 0.3)};
    CHECK_THROWS_AS(regional_metrics(only_atm, std::vector<double>{0.2, 0.3}), EmptyRegion);
  }

  TEST_CASE("stress scenario list") {
    const auto sc = stress_scenarios();
    REQUIRE(sc.size() == 6);
    CHECK(sc[0].id == "reference_smile");
    CHECK(sc[0].strikes.size() == 16);
    CHECK(sc[0].strikes.front() == doctest::Approx(0.5));
    CHECK(sc[0].strikes.back() == doctest::Approx(2.0));
    for (const auto& s : sc) CHECK_NOTHROW(s.params.validate());
    CHECK(sc[1].params.nu == doctest::Approx(0.6));
    CHECK(sc[2].params.rho == -0.9);
    CHECK(sc[3].params.beta == 0.0);
    CHECK(sc[4].params.beta == 1.0);
    CHECK(sc[4].params.nu == 0.0);
    CHECK(sc[5].params.alpha == doctest::Approx(0.08));
  }

  TEST_CASE("stress suite bookkeeping and lognormal sanity") {
    McConfig mc;
    mc.paths = 4000;
    const auto recs = stress_suite(zero_residual(), mc);
    REQUIRE(recs.size() == 6);
    const auto& ln = recs[4].slice;
    for (std::size_t i = 0; i < ln.strikes.size(); ++i) {
      CHECK(std::abs(ln.sigma_mc[i] - ln.params.alpha) < 1e-10);
      CHECK(std::abs(ln.sigma_model[i] - ln.params.alpha) < 1e-14);
    }
    CHECK(recs[4].max_err_model < 1e-10);
    // a zero residual model is the Hagan formula
    for (const auto& r : recs) CHECK(r.max_err_model == r.max_err_hagan);
  }

  TEST_CASE("maturity sweep") {
    McConfig mc;
    mc.paths = 2000;
    const std::vector<double> T{0.25, 1.0, 5.0};
    const auto slices = maturity_sweep(zero_residual(), default_sweep_params(), T, mc);
    REQUIRE(slices.size() == 3);
    for (const auto& s : slices) {
      CHECK(s.strikes.size() == 11);
      for (double v : s.sigma_model) CHECK((std::isfinite(v) && v > 0.0));
      CHECK(std::isfinite(slice_rmse_rel(s)));
    }
    CHECK(slices[2].params.T == 5.0);
    const std::vector<double> bad{6.0};
    CHECK_THROWS_AS(maturity_sweep(zero_residual(), default_sweep_params(), bad, mc), ConfigError);
  }

  TEST_CASE("slice csv layout") {
    McConfig mc;
    mc.paths = 1000;
    const std::vector<double> K{0.9, 1.0, 1.1};
    const auto s = evaluate_slice(zero_residual(), "x", {1.0, 1.0, 1.0, 0.2, 0.5, -0.3, 0.4}, K, mc, 0);
    const std::string text = slice_csv(s);
    CHECK(text.rfind("T,K,n,sigma_mc,sigma_hagan,sigma_model\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  }

  TEST_CASE("latency benchmark protocol") {
    CHECK_THROWS_AS(latency_bench(zero_residual(), 100, {1.0, 1.0, 1.0, 0.2, 0.5, -0.8, 1.2}),
                    ConfigError);
    McConfig mc;
    const auto s = latency_bench(zero_residual(), 10000, {1.0, 1.0, 1.0, 0.2, 0.5, -0.8, 1.2}, 1, mc);
    CHECK(s.points == 10000);
    CHECK(s.warmup == 100);
    CHECK(s.median_us > 0.0);
    CHECK(s.p99_us >= s.median_us);
    CHECK(s.speedup > 1.0);
  }
}
