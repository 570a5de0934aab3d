#include "cav/verification.hpp"

#include "test_games.hpp"

#include <doctest.h>

#include <cmath>

using namespace cav;
using namespace cav::testutil;

TEST_CASE("symmetric weights make the deviation gap vanish") {
  auto g = velocity_game(3, 1, Mat::Ones(3, 3), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{8}});
  const auto theta = init_params(net, 3, 4);
  const auto rep = check_potential_inequality(g, net, theta, 50, 12, 25);
  CHECK(rep.bound == 0.0);
  CHECK(rep.trials == 50);
  CHECK(rep.max_gap <= 1e-8);
}

TEST_CASE("asymmetric weights stay within the analytic bound") {
  Mat l(2, 2);
  l << 0, 0.9, 0.3, 0;
  auto g = velocity_game(2, 1, l, 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{8}});
  const auto theta = init_params(net, 2, 9);
  const auto rep = check_potential_inequality(g, net, theta, 100, 21, 25);
  CHECK(rep.bound == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(rep.within_bound);
}

TEST_CASE("rescaled identity holds for separable weights") {
  auto g = velocity_game(3, 1, Mat::Zero(3, 3), 0.02, 2.0, 1.0, -1.0);
  Vec gamma(3), tau(3);
  gamma << 0.115, 0.395, 2.3;
  tau << 10.0, 3.0, 0.5;
  g.weights = InteractionWeights::separable(gamma, tau);
  const PolicyNet net(1, 1, PolicyArch{{8}});
  const auto theta = init_params(net, 3, 6);
  const auto rep = check_rescaled_identity(g, net, theta, 60, 33, 25);
  CHECK(rep.max_rel_gap <= 1e-8);
  CHECK(rep.sign_checked > 0);
  CHECK(rep.sign_agreements == rep.sign_checked);
  // tau_1/gamma_1 = 10/0.115
  CHECK((*g.weights.tau)(0) / (*g.weights.gamma)(0) ==
        doctest::Approx(86.95652173913044).epsilon(1e-12));
}

TEST_CASE("rescaled identity rejects plain weight matrices") {
  auto g = velocity_game(2, 1, Mat::Ones(2, 2));
  const PolicyNet net(1, 1, PolicyArch{{4}});
  const auto theta = init_params(net, 2, 1);
  CHECK_THROWS(check_rescaled_identity(g, net, theta, 5, 0, 10));
}

TEST_CASE("relabeling identical players leaves the potential unchanged") {
  auto g = velocity_game(3, 1, Mat::Ones(3, 3), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{6}});
  const auto theta = init_params(net, 3, 14);
  PolicyParams swapped = theta;
  for (int k = 0; k < theta.player_size(0); ++k) {
    swapped.flat(swapped.player_offset(0) + k) = theta.player_data(2)[k];
    swapped.flat(swapped.player_offset(2) + k) = theta.player_data(0)[k];
  }
  const auto grid = TimeGrid::uniform(1.0, 20);
  const auto a = simulate(g, net, theta, grid, 1, 0);
  const auto b = simulate(g, net, swapped, grid, 1, 0);
  CHECK(estimate_potential(g, a).phi ==
        doctest::Approx(estimate_potential(g, b).phi).epsilon(1e-12));
}

TEST_CASE("exploitability of a costless game is zero") {
  auto g = velocity_game(2, 1, Mat::Zero(2, 2));
  const PolicyNet net(1, 1, PolicyArch{{4}});
  const auto theta = init_params(net, 2, 2);
  TrainConfig cfg;
  cfg.iterations = 10;
  cfg.steps = 5;
  cfg.samples = 1;
  CHECK(exploitability(g, net, theta, 0, cfg) == 0.0);
  CHECK(exploitability(g, net, theta, 1, cfg) == 0.0);
}

TEST_CASE("a trained single-player policy certifies as near-optimal") {
  auto g = velocity_game(1, 1, Mat::Zero(1, 1), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{16}});
  TrainConfig cfg;
  cfg.iterations = 400;
  cfg.steps = 20;
  cfg.samples = 1;
  cfg.seed = 7;
  const auto report = train(g, net, cfg);
  TrainConfig br_cfg = cfg;
  br_cfg.iterations = 300;
  br_cfg.seed = 99;
  const auto cert = certify(g, net, report.final_params, br_cfg);
  CHECK(cert.improvement(0) >= 0.0);
  CHECK(cert.improvement(0) <= cert.eps_tol * std::abs(cert.incumbent_cost(0)));
  CHECK(cert.pass);
  CHECK(cert.alpha == 0.0);
}

TEST_CASE("an untrained incumbent is exploitable") {
  auto g = velocity_game(2, 1, Mat::Ones(2, 2), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{8}});
  const auto theta = init_params(net, 2, 3);  // far from any equilibrium
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.steps = 15;
  cfg.samples = 1;
  cfg.seed = 3;
  CHECK(exploitability(g, net, theta, 0, cfg) > 0.1);
}
