#include "cav/trainer.hpp"

#include "test_games.hpp"

#include <doctest.h>

#include <cmath>

using namespace cav;
using namespace cav::testutil;

TEST_CASE("config validation rejects bad hyperparameters") {
  TrainConfig cfg;
  cfg.iterations = 0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.learning_rate = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.samples = 0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.steps = -1;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.grad_tolerance = -1e-3;
  CHECK_THROWS(cfg.validate());
  TrainConfig{}.validate();
}

TEST_CASE("zero objective leaves the parameters untouched") {
  auto g = velocity_game(2, 1, Mat::Zero(2, 2));
  const PolicyNet net(1, 1, PolicyArch{{8}});
  TrainConfig cfg;
  cfg.iterations = 5;
  cfg.steps = 4;
  cfg.samples = 1;
  cfg.seed = 3;
  const auto report = train(g, net, cfg);
  const auto init = init_params(net, 2, cfg.seed);
  CHECK((report.final_params.flat - init.flat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(report.final_estimate.phi == 0.0);
  CHECK(report.stop_reason == "iterations");
}

TEST_CASE("training is deterministic in the seed") {
  auto g = acceleration_game(2, 1, 0.1, Mat::Ones(2, 2));
  g.costs.players[0].terminal_coeff = 2.0;
  g.costs.players[1].terminal_coeff = 2.0;
  g.costs.players[0].target = Vec::Constant(1, 1.0);
  g.costs.players[1].target = Vec::Constant(1, 1.0);
  const PolicyNet net(2, 1, PolicyArch{{8}});
  TrainConfig cfg;
  cfg.iterations = 20;
  cfg.steps = 10;
  cfg.samples = 4;
  cfg.seed = 11;
  const auto a = train(g, net, cfg);
  const auto b = train(g, net, cfg);
  CHECK(a.phi_history == b.phi_history);
  CHECK((a.final_params.flat - b.final_params.flat).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("single vehicle learns to reach the target") {
  auto g = velocity_game(1, 1, Mat::Zero(1, 1), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{16, 16}});
  TrainConfig cfg;
  cfg.iterations = 400;
  cfg.steps = 20;
  cfg.samples = 1;
  cfg.seed = 7;
  const auto report = train(g, net, cfg);
  CHECK(report.final_estimate.phi < report.phi_history.front());
  const auto batch = simulate(g, net, report.final_params,
                              TimeGrid::uniform(1.0, 20), 1, 0);
  const double x_T = batch.states[0][0](20, 0);
  CHECK(std::abs(x_T - 1.0) <= 0.05);
}

TEST_CASE("gradient tolerance stops early") {
  auto g = velocity_game(1, 1, Mat::Zero(1, 1), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{8}});
  TrainConfig cfg;
  cfg.iterations = 500;
  cfg.steps = 10;
  cfg.samples = 1;
  cfg.seed = 2;
  cfg.grad_tolerance = 1e6;  // any finite gradient passes
  const auto report = train(g, net, cfg);
  CHECK(report.stop_reason == "tolerance");
  CHECK(report.phi_history.size() == 1);
}

TEST_CASE("checkpoint hook fires on the configured cadence") {
  auto g = velocity_game(1, 1, Mat::Zero(1, 1), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{4}});
  TrainConfig cfg;
  cfg.iterations = 30;
  cfg.steps = 5;
  cfg.samples = 1;
  cfg.checkpoint_every = 10;
  std::vector<int> seen;
  const auto report = train(g, net, cfg, [&](int it, const PolicyParams&) {
    seen.push_back(it);
  });
  CHECK(seen == std::vector<int>{10, 20, 30});
  CHECK(report.phi_history.size() == 30);
}

TEST_CASE("warm start resumes from the given parameters") {
  auto g = velocity_game(2, 1, Mat::Zero(2, 2));  // zero objective
  const PolicyNet net(1, 1, PolicyArch{{8}});
  PolicyParams start = init_params(net, 2, 31);
  start.flat.array() += 0.125;
  TrainConfig cfg;
  cfg.iterations = 3;
  cfg.steps = 4;
  cfg.samples = 1;
  const auto report = train_from(g, net, start, cfg);
  CHECK((report.final_params.flat - start.flat).cwiseAbs().maxCoeff() == 0.0);

  // with a real objective, a warm start from a trained point stays better
  // than the cold start it came from
  auto g2 = velocity_game(1, 1, Mat::Zero(1, 1), 0.1, 10.0, 1.0, -1.0);
  TrainConfig c2;
  c2.iterations = 100;
  c2.steps = 10;
  c2.samples = 1;
  c2.seed = 4;
  const PolicyNet net2(1, 1, PolicyArch{{8}});
  const auto cold = train(g2, net2, c2);
  TrainConfig fine = c2;
  fine.learning_rate = 1e-3;
  const auto warm = train_from(g2, net2, cold.final_params, fine);
  CHECK(warm.phi_history.front() ==
        doctest::Approx(cold.final_estimate.phi).epsilon(1e-12));
  CHECK(warm.final_estimate.phi <= cold.final_estimate.phi + 1e-3);
}

TEST_CASE("best response moves only the chosen player and improves it") {
  auto g = velocity_game(2, 1, Mat::Ones(2, 2), 0.1, 10.0, 1.0, -1.0);
  const PolicyNet net(1, 1, PolicyArch{{8}});
  const auto incumbent = init_params(net, 2, 5);
  TrainConfig cfg;
  cfg.iterations = 150;
  cfg.steps = 10;
  cfg.samples = 1;
  cfg.seed = 5;
  const auto report = train_best_response(g, net, incumbent, 0, cfg);
  // opponent slice frozen bitwise
  for (int k = 0; k < incumbent.player_size(1); ++k)
    CHECK(report.final_params.player_data(1)[k] == incumbent.player_data(1)[k]);
  const auto grid = TimeGrid::uniform(1.0, 10);
  const auto before = simulate(g, net, incumbent, grid, 1, 0);
  const auto after = simulate(g, net, report.final_params, grid, 1, 0);
  CHECK(estimate_player_objective(g, after, 0) <
        estimate_player_objective(g, before, 0));
  CHECK_THROWS(train_best_response(g, net, incumbent, 2, cfg));
}
