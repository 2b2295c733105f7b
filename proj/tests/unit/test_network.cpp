#include <doctest.h>

#include <cmath>
#include <random>

#include "sabrnet/errors.hpp"
#include "sabrnet/nn/adam.hpp"
#include "sabrnet/nn/model.hpp"
#include "sabrnet/nn/network.hpp"
#include "sabrnet/nn/plateau.hpp"

using namespace sabrnet;
using namespace sabrnet::nn;

namespace {

// Below this size a central difference is dominated by cancellation in (L+ - L-);
// pre-normalisation biases have an exactly zero gradient.
constexpr double kGradCheckFloor = 1e-4;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (auto& v : m.data) v = d(rng);
  return m;
}

void zero(Network& net) {
  for (auto t : net.parameters()) std::fill(t.begin(), t.end(), 0.0);
  for (auto& bn : net.norms()) std::fill(bn.gamma.begin(), bn.gamma.end(), 1.0);
}

double batch_loss(Network& net, const Matrix& x, const std::vector<double>& y) {
  const Matrix out = net.forward(x, Mode::training);
  return mse(out.data, y);
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("shapes and initialisation") {
    const Network net = Network::make(11, {64, 64, 32}, 1);
    CHECK(net.layer_dims() == std::vector<std::size_t>{11, 64, 64, 32, 1});
    CHECK(net.norms().size() == 3);
    const double bound = std::sqrt(6.0 / 11.0);
    for (double w : net.layers()[0].weight) CHECK(std::abs(w) <= bound);
    CHECK(Network::make(11, {64, 64, 32}, 1).layers()[2].weight == net.layers()[2].weight);
    CHECK(Network::make(11, {64, 64, 32}, 2).layers()[2].weight != net.layers()[2].weight);
  }

  TEST_CASE("zero network outputs zero") {
    Network net = Network::make(7, {8, 4}, 3);
    zero(net);
    const Matrix x = random_matrix(5, 7, 1);
    for (double v : net.predict(x).data) CHECK(v == 0.0);
    for (double v : net.forward(x, Mode::training).data) CHECK(v == 0.0);
  }

  TEST_CASE("single linear layer selects a coordinate") {
    Network net = Network::make(7, {}, 3, false);
    auto& w = net.layers()[0].weight;
    std::fill(w.begin(), w.end(), 0.0);
    w[4] = 1.0;
    const Matrix x = random_matrix(6, 7, 2);
    const Matrix out = net.predict(x);
    for (std::size_t r = 0; r < 6; ++r) CHECK(out(r, 0) == x(r, 4));
  }

  TEST_CASE("training-mode batch norm standardises pre-activations") {
    Network net = Network::make(11, {64}, 5);
    const Matrix x = random_matrix(128, 11, 3);
    ForwardCache cache;
    net.forward(x, Mode::training, &cache);
    const Matrix& xhat = cache.hidden[0].xhat;
    for (std::size_t j = 0; j < xhat.cols; ++j) {
      double mean = 0.0, var = 0.0;
      for (std::size_t r = 0; r < xhat.rows; ++r) mean += xhat(r, j);
      mean /= xhat.rows;
      for (std::size_t r = 0; r < xhat.rows; ++r) var += (xhat(r, j) - mean) * (xhat(r, j) - mean);
      var /= xhat.rows;
      CHECK(std::abs(mean) <= 1e-6);
      CHECK(std::abs(var - 1.0) <= 1e-4);
    }
  }

  TEST_CASE("running statistics follow momentum 0.1") {
    Network net = Network::make(3, {2}, 5);
    const Matrix x = random_matrix(10, 3, 4);
    const auto before = net.norms()[0].running_mean;
    net.forward(x, Mode::training);
    const auto after = net.norms()[0].running_mean;
    // mean of the pre-activation column
    Matrix z(10, 2);
    for (std::size_t r = 0; r < 10; ++r)
      for (std::size_t j = 0; j < 2; ++j) {
        double acc = net.layers()[0].bias[j];
        for (std::size_t k = 0; k < 3; ++k) acc += x(r, k) * net.layers()[0].weight[j * 3 + k];
        z(r, j) = acc;
      }
    for (std::size_t j = 0; j < 2; ++j) {
      double m = 0.0;
      for (std::size_t r = 0; r < 10; ++r) m += z(r, j);
      m /= 10;
      CHECK(after[j] == doctest::Approx(0.9 * before[j] + 0.1 * m).epsilon(1e-12));
    }
    const auto snapshot = net.norms()[0].running_var;
    (void)net.predict(x);
    CHECK(net.norms()[0].running_var == snapshot);
  }

  TEST_CASE("shape errors") {
    Network net = Network::make(7, {8}, 1);
    CHECK_THROWS_AS((void)net.predict(Matrix(3, 6)), ShapeMismatch);
    CHECK_THROWS_AS((void)net.predict(Matrix(0, 7)), ShapeMismatch);
    CHECK_THROWS_AS(mse(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), ShapeMismatch);
  }

  TEST_CASE("gradients match central differences") {
    Network net = Network::make(7, {8}, 9);
    // move batch-norm parameters away from their trivial initial values
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& v : net.norms()[0].gamma) v = 1.0 + u(rng);
    for (auto& v : net.norms()[0].shift) v = u(rng);
    for (auto& v : net.layers()[1].bias) v = u(rng);

    const Matrix x = random_matrix(16, 7, 21);
    std::vector<double> y(16);
    for (auto& v : y) v = u(rng);

    ForwardCache cache;
    const Matrix out = net.forward(x, Mode::training, &cache);
    Matrix d_out(16, 1);
    for (std::size_t r = 0; r < 16; ++r) d_out.data[r] = 2.0 * (out.data[r] - y[r]) / 16.0;
    const Gradients g = net.backward(cache, d_out);

    auto params = net.parameters();
    REQUIRE(g.size() == params.size());
    std::size_t total = 0;
    for (const auto& t : params) total += t.size();
    std::uniform_int_distribution<std::size_t> pick(0, total - 1);
    const double h = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::size_t flat = pick(rng), t = 0;
      while (flat >= params[t].size()) flat -= params[t++].size();
      double& p = params[t][flat];
      const double saved = p;
      p = saved + h;
      const double lp = batch_loss(net, x, y);
      p = saved - h;
      const double lm = batch_loss(net, x, y);
      p = saved;
      const double numeric = (lp - lm) / (2 * h);
      const double analytic = g[t][flat];
      const double err = std::abs(numeric - analytic) /
                         std::max({std::abs(numeric), std::abs(analytic), kGradCheckFloor});
      worst = std::max(worst, err);
    }
    MESSAGE("worst relative gradient error " << worst);
    CHECK(worst <= 1e-5);
  }

  TEST_CASE("loss examples") {
    std::vector<Sample> rows(2);
    rows[0].sigma_hagan = 1.0;
    rows[0].sigma_mc = 1.1;
    rows[1].sigma_hagan = 1.0;
    rows[1].sigma_mc = 0.9;
    CHECK(loss(std::vector<double>{0.0, 0.0}, rows, TargetMode::residual_ratio) ==
          doctest::Approx(0.01).epsilon(1e-12));
    CHECK(loss(std::vector<double>{0.1, -0.1}, rows, TargetMode::residual_ratio) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(loss(std::vector<double>{1.1, 0.9}, rows, TargetMode::direct) == 0.0);
    auto scaled = rows;
    for (auto& r : scaled) {
      r.sigma_hagan *= 3.7;
      r.sigma_mc *= 3.7;
    }
    const std::vector<double> pred{0.03, -0.02};
    CHECK(loss(pred, scaled, TargetMode::residual_ratio) ==
          doctest::Approx(loss(pred, rows, TargetMode::residual_ratio)).epsilon(1e-12));
    rows[0].sigma_hagan = 0.0;
    CHECK_THROWS_AS(loss(pred, rows, TargetMode::residual_ratio), DomainError);
    CHECK_THROWS_AS(mse(std::vector<double>{1e200}, std::vector<double>{-1e200}), NonFinite);
  }

  TEST_CASE("adam examples") {
    std::vector<double> p(4, 1.0);
    Adam adam({}, {4});
    adam.step({std::span<double>(p)}, {std::vector<double>(4, 1.0)}, 0.004);
    for (double v : p) CHECK(v - 1.0 == doctest::Approx(-0.004).epsilon(1e-7));
    const double delta1 = p[0] - 1.0;
    const double before = p[0];
    adam.step({std::span<double>(p)}, {std::vector<double>(4, 1.0)}, 0.004);
    CHECK(std::abs(p[0] - before) <= std::abs(delta1) * 1.05);

    std::vector<double> q(3, 0.5);
    Adam idle({}, {3});
    idle.step({std::span<double>(q)}, {std::vector<double>(3, 0.0)}, 0.004);
    for (double v : q) CHECK(v == 0.5);

    CHECK_THROWS_AS(idle.step({std::span<double>(q)}, {std::vector<double>(3, NAN)}, 0.004),
                    NonFinite);
    CHECK_THROWS_AS(idle.step({std::span<double>(q)}, {std::vector<double>(2, 0.0)}, 0.004),
                    ShapeMismatch);
  }

  TEST_CASE("plateau scheduler on a constant trace") {
    PlateauScheduler s(4e-3);
    std::vector<std::size_t> reductions;
    for (std::size_t epoch = 1; epoch <= 12; ++epoch)
      if (s.step(1.0)) reductions.push_back(epoch);
    CHECK(reductions == std::vector<std::size_t>{6, 11});
    CHECK(s.lr() == doctest::Approx(1e-3));
  }

  TEST_CASE("plateau threshold is relative") {
    PlateauScheduler s(1.0, 0.5, 2, 1e-6);
    s.step(1.0);
    s.step(1.0 - 1e-7);  // not an improvement
    CHECK(s.bad_epochs() == 1);
    s.step(0.9);
    CHECK(s.bad_epochs() == 0);
    CHECK(s.best() == 0.9);
    CHECK_THROWS_AS(PlateauScheduler(1.0, 1.5), ConfigError);
  }
}
