#include "cav/scenarios.hpp"

#include "cav/rng.hpp"
#include "cav/rollout.hpp"
#include "cav/serialization.hpp"
#include "cav/verification.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <stdexcept>

namespace cav {

namespace {

Vec start_state(ControlModel model, const Vec& position) {
  if (model == ControlModel::Velocity) return position;
  Vec x = Vec::Zero(2 * position.size());  // vehicles start at rest
  x.head(position.size()) = position;
  return x;
}

GameSpec fleet_spec(ControlModel model, int players, int dim, double sigma,
                    double action_coeff, double terminal_coeff,
                    const Vec& start_pos, const Vec& target) {
  GameSpec spec;
  spec.num_players = players;
  spec.horizon = 1.0;
  spec.dynamics.model = model == ControlModel::Velocity
                            ? DynamicsModel::VelocityControl
                            : DynamicsModel::AccelerationControl;
  spec.dynamics.dim = dim;
  if (sigma > 0.0) spec.dynamics.noise_scale = Vec::Constant(players, sigma);
  spec.costs.players.assign(players, PlayerCost{.action_cost_coeff = action_coeff,
                                                .terminal_coeff = terminal_coeff,
                                                .target = target});
  spec.initial_states.assign(players, start_state(model, start_pos));
  return spec;
}

TrainConfig default_train(const GameSpec& spec) {
  TrainConfig cfg;
  cfg.iterations = 2000;
  cfg.learning_rate = 1e-2;
  cfg.steps = 50;
  cfg.samples = spec.dynamics.deterministic() ? 1 : 64;
  return cfg;
}

}  // namespace

ScenarioPreset preset_interaction(ControlModel model, double beta) {
  const int players = 10;
  const int dim = 1;
  // single-integrator dynamics carry no diffusion term
  const double sigma = model == ControlModel::Acceleration ? 0.1 : 0.0;
  ScenarioPreset p;
  p.name = model == ControlModel::Velocity ? "interaction_1d_velocity"
                                           : "interaction_1d_acceleration";
  p.spec = fleet_spec(model, players, dim, sigma, 0.1, 10.0,
                      Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  p.spec.weights = InteractionWeights::uniform(
      players, std::pow(static_cast<double>(players), beta - 1.0));
  p.spec.kernel = Kernel::scaled_radial(beta, players, dim);
  p.spec.validate();
  p.train = default_train(p.spec);
  return p;
}

ScenarioPreset preset_obstacle(ObstacleSize size) {
  const int players = 10;
  const int dim = 2;
  ScenarioPreset p;
  p.name = "obstacle_2d";
  p.spec = fleet_spec(ControlModel::Acceleration, players, dim, 0.0, 0.02, 2.0,
                      Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  p.spec.weights = InteractionWeights::uniform(players, 1.0);
  p.spec.kernel = Kernel::scaled_radial(1.0, players, dim);
  if (size != ObstacleSize::None) {
    ObstacleCost obstacle;
    obstacle.curvature = size == ObstacleSize::Small ? 100.0 : 4.0;
    obstacle.center = Vec::Zero(2);
    for (auto& pc : p.spec.costs.players) pc.obstacle = obstacle;
  }
  p.spec.validate();
  p.train = default_train(p.spec);
  return p;
}

ScenarioPreset preset_heterogeneous(ControlModel model) {
  const int players = 9;
  Vec gamma(players), tau(players);
  gamma << 0.115, 0.117, 0.095, 0.395, 0.319, 0.347, 1.805, 2.235, 2.353;
  tau << 10, 10, 10, 3, 3, 3, 0.5, 0.5, 0.5;
  ScenarioPreset p;
  p.name = "heterogeneous_1d";
  p.spec = fleet_spec(model, players, 1, 0.0, 0.02, 2.0,
                      Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  p.spec.weights = InteractionWeights::separable(gamma, tau);
  p.spec.kernel = Kernel::inverse_quadratic(static_cast<double>(players));
  p.spec.validate();
  p.train = default_train(p.spec);
  p.color_group = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  return p;
}

ScenarioPreset preset_by_name(const std::string& name) {
  if (name == "interaction_1d_velocity")
    return preset_interaction(ControlModel::Velocity, 1.0);
  if (name == "interaction_1d_acceleration")
    return preset_interaction(ControlModel::Acceleration, 1.0);
  if (name == "obstacle_2d") return preset_obstacle(ObstacleSize::Large);
  if (name == "heterogeneous_1d")
    return preset_heterogeneous(ControlModel::Velocity);
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"interaction_1d_velocity", "interaction_1d_acceleration",
          "obstacle_2d", "heterogeneous_1d"};
}

int run_scenario(const ScenarioPreset& preset, const std::string& out_dir,
                 const RunOptions& opts) {
  try {
    ScenarioPreset p = preset;
    p.train.seed = opts.seed;
    if (opts.iterations > 0) p.train.iterations = opts.iterations;
    if (opts.steps > 0) p.train.steps = opts.steps;
    if (opts.samples > 0) p.train.samples = opts.samples;

    std::filesystem::create_directories(out_dir);
    const auto out = [&](const std::string& f) { return out_dir + "/" + f; };

    json config;
    config["preset"] = p.name;
    config["game"] = to_json(p.spec);
    config["train"] = to_json(p.train);
    config["arch"] = to_json(p.arch);
    save_json(config, out("config.json"));

    const PolicyNet net(p.spec.dynamics.state_dim(),
                        p.spec.dynamics.action_dim(), p.arch);
    std::cerr << "[" << p.name << "] training " << p.train.iterations
              << " iterations...\n";
    TrainReport report = train(p.spec, net, p.train);
    save_json(report_to_json(report), out("report.json"));
    write_phi_history_csv(report, out("phi_history.csv"));
    save_json(to_json(Checkpoint{p.spec, p.arch, report.final_params}),
              out("checkpoint.json"));

    const TimeGrid grid = TimeGrid::uniform(p.spec.horizon, p.train.steps);
    const RolloutBatch batch =
        simulate(p.spec, net, report.final_params, grid,
                 effective_samples(p.spec, p.train.samples),
                 stream_seed(p.train.seed, 0x401e, 0xe7a1));
    write_trajectories_csv(batch, out("trajectories.csv"));
    write_trajectory_svg(p.spec, batch, p.color_group, out("figure.svg"));

    if (report.stop_reason == "diverged") {
      std::cerr << "[" << p.name << "] training diverged\n";
      return 2;
    }

    if (opts.verify) {
      std::cerr << "[" << p.name << "] best-response verification...\n";
      TrainConfig br_cfg = p.train;
      br_cfg.iterations = 1000;
      br_cfg.seed = stream_seed(p.train.seed, 0xb4);
      const NECertificate cert = certify(p.spec, net, report.final_params, br_cfg);
      save_json(certificate_to_json(cert), out("certificate.json"));
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "scenario failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cav
