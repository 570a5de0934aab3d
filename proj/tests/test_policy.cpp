#include "cav/policy.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cav;

TEST_CASE("init_params is reproducible and seed-sensitive") {
  const PolicyNet net(1, 1, PolicyArch{{8, 8}});
  const auto a = init_params(net, 3, 42);
  const auto b = init_params(net, 3, 42);
  const auto c = init_params(net, 3, 43);
  CHECK((a.flat - b.flat).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.flat - c.flat).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("adding players keeps existing slices") {
  const PolicyNet net(1, 1, PolicyArch{{4}});
  const auto small = init_params(net, 2, 7);
  const auto big = init_params(net, 5, 7);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < small.player_size(i); ++k)
      CHECK(small.player_data(i)[k] == big.player_data(i)[k]);
}

TEST_CASE("zero parameters give the zero action") {
  const PolicyNet net(2, 2, PolicyArch{{16}});
  const auto p = zero_params(net, 1);
  const Vec a = net.eval(p.player_data(0), 0.37, Vec::Constant(2, 3.0));
  CHECK(a.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("affine policy passes the state through an identity row") {
  const PolicyNet net(1, 1, PolicyArch{{}});  // no hidden layers
  PolicyParams p = zero_params(net, 1);
  // single layer: weight row (w_t, w_x) = (0, 1), bias 0
  p.flat(1) = 1.0;
  const Vec a = net.eval(p.player_data(0), 0.3, Vec::Constant(1, 2.0));
  CHECK(a(0) == doctest::Approx(2.0));
}

TEST_CASE("affine init keeps the initial action near zero") {
  const PolicyNet net(1, 1, PolicyArch{{}});
  const auto p = init_params(net, 1, 11);
  const Vec a = net.eval(p.player_data(0), 0.0, Vec::Constant(1, -1.0));
  CHECK(std::abs(a(0)) < 0.25);
}

TEST_CASE("flat layout round-trips by player") {
  const PolicyNet net(2, 1, PolicyArch{{5, 3}});
  const auto p = init_params(net, 4, 9);
  CHECK(p.players() == 4);
  CHECK(p.size() == 4 * net.params_per_player);
  Vec rebuilt(p.size());
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < p.player_size(i); ++k)
      rebuilt(p.player_offset(i) + k) = p.player_data(i)[k];
  CHECK((rebuilt - p.flat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("empirical Lipschitz constant respects the layer-norm bound") {
  const PolicyNet net(2, 2, PolicyArch{{16, 16}});
  const auto p = init_params(net, 1, 5);
  const double bound = lipschitz_bound(net, p.player_data(0));
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 1000; ++t) {
    Vec x(2), y(2);
    for (int k = 0; k < 2; ++k) {
      x(k) = gauss(rng);
      y(k) = x(k) + 0.3 * gauss(rng);
    }
    const double tt = 0.5;
    const Vec ax = net.eval(p.player_data(0), tt, x);
    const Vec ay = net.eval(p.player_data(0), tt, y);
    const double dx = (x - y).cwiseAbs().maxCoeff();
    if (dx == 0.0) continue;
    const double da = (ax - ay).cwiseAbs().maxCoeff();
    CHECK(da <= bound * dx * (1.0 + 1e-12));
  }
}

TEST_CASE("evaluation is deterministic") {
  const PolicyNet net(4, 2, PolicyArch{{32, 32}});
  const auto p = init_params(net, 1, 123);
  Vec x(4);
  x << 0.1, -0.2, 0.3, 1.4;
  const Vec a = net.eval(p.player_data(0), 0.25, x);
  const Vec b = net.eval(p.player_data(0), 0.25, x);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}
