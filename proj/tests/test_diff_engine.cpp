#include "cav/diff_engine.hpp"

#include "test_games.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cav;
using namespace cav::testutil;

namespace {

RolloutObjective make_objective(const GameSpec& g, const PolicyNet& net,
                      const TimeGrid& grid, const NoiseBatch& noise,
                      ObjectiveWeights w) {
  RolloutObjective obj;
  obj.spec = &g;
  obj.net = &net;
  obj.grid = grid;
  obj.weights = std::move(w);
  obj.noise = &noise;
  return obj;
}

}  // namespace

TEST_CASE("gradient vanishes when the objective ignores the parameters") {
  auto g = velocity_game(2, 1, Mat::Zero(2, 2));  // all costs zero
  const PolicyNet net(1, 1, PolicyArch{{8}});
  const auto theta = init_params(net, 2, 1);
  const auto grid = TimeGrid::uniform(1.0, 10);
  const auto noise = sample_noise(g, grid, 1, 0);
  const auto res = grad(theta, make_objective(g, net, grid, noise, potential_objective(g)));
  CHECK(res.value == 0.0);
  CHECK(res.gradient.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-step affine rollout matches the hand derivative") {
  // a = theta (output bias), X_1 = xi + theta, value = (xi + theta - z)^2
  auto g = velocity_game(1, 1, Mat::Zero(1, 1), 0.0, 1.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{}});
  auto theta = constant_policy(net, 1, 0.5);
  const auto grid = TimeGrid::uniform(1.0, 1);
  const auto noise = sample_noise(g, grid, 1, 0);
  const auto obj = make_objective(g, net, grid, noise, potential_objective(g));
  const auto res = grad(theta, obj);
  CHECK(res.value == doctest::Approx(2.25).epsilon(1e-14));
  const int bias_idx = net.layers.back().b_off;
  CHECK(res.gradient(bias_idx) == doctest::Approx(-3.0).epsilon(1e-12));
  // and the finite-difference oracle agrees
  const Vec fd = finite_diff(theta, obj, {bias_idx}, 1e-6);
  CHECK(std::abs(res.gradient(bias_idx) - fd(0)) < 1e-6);
}

TEST_CASE("central differences are exact on a quadratic") {
  // xi = 0, target 0: value = theta^2, derivative 6 at theta = 3
  auto g = velocity_game(1, 1, Mat::Zero(1, 1), 0.0, 1.0, 0.0, 0.0);
  const PolicyNet net(1, 1, PolicyArch{{}});
  auto theta = constant_policy(net, 1, 3.0);
  const auto grid = TimeGrid::uniform(1.0, 1);
  const auto noise = sample_noise(g, grid, 1, 0);
  const auto obj = make_objective(g, net, grid, noise, potential_objective(g));
  const int bias_idx = net.layers.back().b_off;
  const Vec fd = finite_diff(theta, obj, {bias_idx}, 1e-3);
  CHECK(fd(0) == doctest::Approx(6.0).epsilon(1e-9));

  auto g0 = velocity_game(1, 1, Mat::Zero(1, 1));  // zero objective
  const auto obj0 = make_objective(g0, net, grid, noise, potential_objective(g0));
  CHECK(finite_diff(theta, obj0, {bias_idx}, 1e-3)(0) == 0.0);
}

TEST_CASE("primal value matches the plain evaluation bit for bit") {
  auto g = acceleration_game(3, 2, 0.1, Mat::Ones(3, 3));
  for (auto& pc : g.costs.players) {
    pc.action_cost_coeff = 0.02;
    pc.terminal_coeff = 2.0;
    pc.target = Vec::Constant(2, 1.0);
    ObstacleCost o;
    o.curvature = 4.0;
    o.center = Vec::Zero(2);
    pc.obstacle = o;
  }
  const PolicyNet net(4, 2, PolicyArch{{16, 16}});
  const auto theta = init_params(net, 3, 21);
  const auto grid = TimeGrid::uniform(1.0, 15);
  const auto noise = sample_noise(g, grid, 4, 3);
  const auto obj = make_objective(g, net, grid, noise, potential_objective(g));
  const auto res = grad(theta, obj);
  CHECK(res.value == obj(theta));
}

TEST_CASE("gradient is linear in the objective scale") {
  auto g = velocity_game(2, 1, Mat::Ones(2, 2), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{8}});
  const auto theta = init_params(net, 2, 8);
  const auto grid = TimeGrid::uniform(1.0, 10);
  const auto noise = sample_noise(g, grid, 1, 0);
  auto w = potential_objective(g);
  const auto base = grad(theta, make_objective(g, net, grid, noise, w));
  ObjectiveWeights w3 = w;
  w3.running_scale *= 3.0;
  w3.terminal_scale *= 3.0;
  w3.pair_coeff *= 3.0;
  const auto scaled = grad(theta, make_objective(g, net, grid, noise, w3));
  CHECK((scaled.gradient - 3.0 * base.gradient).cwiseAbs().maxCoeff() <
        1e-12 * (1.0 + base.gradient.cwiseAbs().maxCoeff()));
}

TEST_CASE("reverse mode agrees with finite differences across dynamics") {
  std::mt19937_64 pick(19);
  auto check_scenario = [&](const GameSpec& g, const PolicyNet& net,
                            int samples, double tol) {
    const auto theta = init_params(net, g.num_players, 17);
    const auto grid = TimeGrid::uniform(g.horizon, 12);
    const auto noise = sample_noise(g, grid, samples, 29);
    const auto obj = make_objective(g, net, grid, noise, potential_objective(g));
    const auto res = grad(theta, obj);
    std::vector<int> coords;
    for (int k = 0; k < 25; ++k)
      coords.push_back(static_cast<int>(pick() % theta.size()));
    const Vec fd = finite_diff(theta, obj, coords, 1e-5);
    // guard near-zero components against finite-difference roundoff
    const double floor = 1e-3 * res.gradient.cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const double got = res.gradient(coords[k]);
      const double ref = fd(static_cast<Eigen::Index>(k));
      const double rel = std::abs(got - ref) / std::max(std::abs(ref), floor);
      CHECK(rel <= tol);
    }
  };

  SUBCASE("velocity control with interaction") {
    auto g = velocity_game(3, 1, Mat::Ones(3, 3), 0.1, 10.0, 1.0, -1.0);
    check_scenario(g, PolicyNet(1, 1, PolicyArch{{16, 16}}), 1, 1e-4);
  }
  SUBCASE("noisy acceleration control with obstacle") {
    auto g = acceleration_game(2, 2, 0.1, Mat::Ones(2, 2));
    for (auto& pc : g.costs.players) {
      pc.action_cost_coeff = 0.02;
      pc.terminal_coeff = 2.0;
      pc.target = Vec::Constant(2, 1.0);
      ObstacleCost o;
      o.curvature = 4.0;
      o.center = Vec::Zero(2);
      pc.obstacle = o;
    }
    check_scenario(g, PolicyNet(4, 2, PolicyArch{{16, 16}}), 4, 1e-3);
  }
}
