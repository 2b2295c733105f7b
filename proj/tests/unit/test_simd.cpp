#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "sabrnet/simd/dense_kernels.hpp"
#include "sabrnet/simd/isa.hpp"
#include "sabrnet/simd/path_kernels.hpp"

using namespace sabrnet::simd;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

struct PathState {
  std::vector<double> fwd, vol, black;
  PathBlock view() { return {fwd, vol, black}; }
};

PathState initial(std::size_t n, double f0, double alpha) {
  return {std::vector<double>(n, f0), std::vector<double>(n, alpha), std::vector<double>(n, f0)};
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Reordered dot products differ by O(k eps sum|a||b|), so compare against the matrix scale.
double max_normwise_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 1e-300, worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(a[i]));
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst / scale;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("isa names and dispatch") {
    CHECK(to_string(Isa::scalar) == "scalar");
    CHECK(isa_available(Isa::scalar));
    CHECK(path_kernels(Isa::scalar).step == &scalar::step);
    CHECK(dense_kernels(Isa::scalar).gemm_nt == &scalar::gemm_nt);
  }

#if defined(SABRNET_HAVE_AVX2)
  TEST_CASE("avx2 path step matches scalar") {
    if (!isa_available(Isa::avx2)) return;
    for (auto scheme : {SigmaScheme::log_exact, SigmaScheme::euler_strict})
      for (double beta : {0.0, 0.3, 0.5, 1.0}) {
        const std::size_t n = 1003;  // exercises the scalar tail
        const double dt = 1.0 / 50;
        const StepCoefficients c{beta, 1.2, -0.8, 0.6, std::sqrt(dt), dt, 0.2, scheme};
        PathState s = initial(n, beta == 0.0 ? 0.02 : 1.0, 0.2);
        PathState v = s;
        for (int k = 0; k < 60; ++k) {
          const auto gw = normals(n, 100 + k), gp = normals(n, 900 + k);
          scalar::step(c, s.view(), gw, gp);
          avx2::step(c, v.view(), gw, gp);
        }
        CAPTURE(beta);
        CHECK(max_rel_diff(s.fwd, v.fwd) < 1e-12);
        CHECK(max_rel_diff(s.vol, v.vol) < 1e-12);
        CHECK(max_rel_diff(s.black, v.black) < 1e-12);
        for (std::size_t i = 0; i < n; ++i) CHECK((s.fwd[i] == 0.0) == (v.fwd[i] == 0.0));
      }
  }

  TEST_CASE("avx2 lognormal step is bit-identical") {
    if (!isa_available(Isa::avx2)) return;
    const std::size_t n = 517;
    const StepCoefficients c{1.0, 0.0, 0.3, std::sqrt(1 - 0.09), 0.1, 0.01, 0.2,
                             SigmaScheme::log_exact};
    PathState s = initial(n, 1.0, 0.2), v = s;
    for (int k = 0; k < 20; ++k) {
      const auto gw = normals(n, k), gp = normals(n, 50 + k);
      scalar::step(c, s.view(), gw, gp);
      avx2::step(c, v.view(), gw, gp);
    }
    CHECK(s.fwd == v.fwd);
    CHECK(v.fwd == v.black);
  }

  TEST_CASE("avx2 payoff sums match scalar") {
    if (!isa_available(Isa::avx2)) return;
    for (std::size_t n : {1u, 3u, 4u, 17u, 4096u, 4099u}) {
      std::vector<double> fwd(n), black(n);
      const auto a = normals(n, 5), b = normals(n, 6);
      for (std::size_t i = 0; i < n; ++i) {
        fwd[i] = std::max(0.0, 1.0 + 0.3 * a[i]);
        black[i] = std::exp(0.2 * b[i]);
      }
      const auto s = scalar::payoff_sums(fwd, black, 1.05);
      const auto v = avx2::payoff_sums(fwd, black, 1.05);
      CHECK(v.diff == doctest::Approx(s.diff).epsilon(1e-12));
      CHECK(v.diff_sq == doctest::Approx(s.diff_sq).epsilon(1e-12));
      CHECK(v.plain == doctest::Approx(s.plain).epsilon(1e-12));
      CHECK(v.plain_sq == doctest::Approx(s.plain_sq).epsilon(1e-12));
    }
  }

  TEST_CASE("avx2 gemm variants match scalar") {
    if (!isa_available(Isa::avx2)) return;
    using Shape = std::tuple<int, int, int>;
    for (auto [m, n, k] : {Shape{1, 1, 1}, Shape{5, 7, 3}, Shape{128, 64, 11}, Shape{33, 1, 32},
                           Shape{9, 64, 64}}) {
      const auto a = normals(static_cast<std::size_t>(m * k), 1);
      const auto b = normals(static_cast<std::size_t>(n * k), 2);
      const auto bt = normals(static_cast<std::size_t>(k * n), 3);
      const auto at = normals(static_cast<std::size_t>(k * m), 4);
      std::vector<double> cs(m * n, 0.5), cv(m * n, 0.5);

      scalar::gemm_nt(m, n, k, a.data(), b.data(), cs.data(), true);
      avx2::gemm_nt(m, n, k, a.data(), b.data(), cv.data(), true);
      CHECK(max_normwise_diff(cs, cv) < 1e-13);

      scalar::gemm_nn(m, n, k, a.data(), bt.data(), cs.data(), false);
      avx2::gemm_nn(m, n, k, a.data(), bt.data(), cv.data(), false);
      CHECK(max_normwise_diff(cs, cv) < 1e-13);

      scalar::gemm_tn(m, n, k, at.data(), bt.data(), cs.data(), false);
      avx2::gemm_tn(m, n, k, at.data(), bt.data(), cv.data(), false);
      CHECK(max_normwise_diff(cs, cv) < 1e-13);
    }
  }

  TEST_CASE("gemm rows do not depend on batch size") {
    for (Isa isa : {Isa::scalar, Isa::avx2}) {
      if (!isa_available(isa)) continue;
      const auto& k = dense_kernels(isa);
      const std::size_t m = 37, n = 64, depth = 11;
      const auto a = normals(m * depth, 8), b = normals(n * depth, 9);
      std::vector<double> full(m * n), one(n);
      k.gemm_nt(m, n, depth, a.data(), b.data(), full.data(), false);
      for (std::size_t r = 0; r < m; ++r) {
        k.gemm_nt(1, n, depth, a.data() + r * depth, b.data(), one.data(), false);
        for (std::size_t j = 0; j < n; ++j) CHECK(one[j] == full[r * n + j]);
      }
    }
  }
#endif

  TEST_CASE("scalar gemm reference values") {
    const double a[] = {1, 2, 3, 4, 5, 6};     // 2x3
    const double b[] = {1, 0, 1, 0, 1, 0};     // 2x3 for nt
    double c[4] = {};
    scalar::gemm_nt(2, 2, 3, a, b, c, false);
    CHECK(c[0] == 4.0);
    CHECK(c[1] == 2.0);
    CHECK(c[2] == 10.0);
    CHECK(c[3] == 5.0);
    const double bn[] = {1, 2, 3, 4, 5, 6};    // 3x2
    scalar::gemm_nn(2, 2, 3, a, bn, c, false);
    CHECK(c[0] == 22.0);
    CHECK(c[3] == 64.0);
    scalar::gemm_tn(3, 2, 2, a, bn, c, false);  // a as 2x3 transposed -> 3x2 times 2x2
    CHECK(c[0] == 1 * 1 + 4 * 3);
  }
}
