#include "cav/diff_engine.hpp"
#include "cav/rng.hpp"
#include "cav/scenarios.hpp"
#include "cav/serialization.hpp"
#include "cav/verification.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using namespace cav;

ScenarioPreset resolve_preset(const std::string& name, double beta,
                              const std::string& obstacle,
                              const std::string& model) {
  const ControlModel cm =
      model == "acceleration" ? ControlModel::Acceleration : ControlModel::Velocity;
  if (name == "interaction_1d_velocity")
    return preset_interaction(ControlModel::Velocity, beta);
  if (name == "interaction_1d_acceleration")
    return preset_interaction(ControlModel::Acceleration, beta);
  if (name == "obstacle_2d") {
    ObstacleSize size = ObstacleSize::Large;
    if (obstacle == "none") size = ObstacleSize::None;
    if (obstacle == "small") size = ObstacleSize::Small;
    return preset_obstacle(size);
  }
  if (name == "heterogeneous_1d") return preset_heterogeneous(cm);
  throw CLI::ValidationError("unknown preset: " + name);
}

int cmd_verify(const std::string& checkpoint_path, const std::string& out_path,
               int br_iters, std::uint64_t seed) {
  const Checkpoint ckpt = checkpoint_from_json(load_json(checkpoint_path));
  const PolicyNet net(ckpt.spec.dynamics.state_dim(),
                      ckpt.spec.dynamics.action_dim(), ckpt.arch);
  TrainConfig br_cfg;
  br_cfg.iterations = br_iters;
  br_cfg.samples = ckpt.spec.dynamics.deterministic() ? 1 : 64;
  br_cfg.seed = seed;
  const NECertificate cert = certify(ckpt.spec, net, ckpt.params, br_cfg);
  const json j = certificate_to_json(cert);
  if (!out_path.empty())
    save_json(j, out_path);
  else
    std::cout << j.dump(2) << "\n";
  return cert.pass ? 0 : 3;
}

int cmd_export(const std::string& checkpoint_path, const std::string& format,
               const std::string& out_path, int steps, int samples,
               std::uint64_t seed) {
  const Checkpoint ckpt = checkpoint_from_json(load_json(checkpoint_path));
  const PolicyNet net(ckpt.spec.dynamics.state_dim(),
                      ckpt.spec.dynamics.action_dim(), ckpt.arch);
  const TimeGrid grid = TimeGrid::uniform(ckpt.spec.horizon, steps);
  const RolloutBatch batch =
      simulate(ckpt.spec, net, ckpt.params, grid,
               effective_samples(ckpt.spec, samples), seed);
  if (format == "csv") {
    if (out_path.empty()) {
      export_csv(batch, std::cout);
    } else {
      write_trajectories_csv(batch, out_path);
    }
    return 0;
  }
  const PotentialEstimate est = estimate_potential(ckpt.spec, batch);
  json j;
  j["phi"] = est.phi;
  j["per_player_cost"] = std::vector<double>(
      est.per_player_cost.data(),
      est.per_player_cost.data() + est.per_player_cost.size());
  j["min_pair_distance"] = est.min_pair_distance;
  j["max_pair_distance"] = est.max_pair_distance;
  j["obstacle_occupancy"] = est.obstacle_occupancy;
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json(j, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-potential game solver for decentralized CAV control"};
  app.require_subcommand(1);

  // run
  std::string preset_name, out_dir = "out", obstacle = "large",
              model = "velocity";
  double beta = 1.0;
  std::uint64_t seed = 0;
  int iters = 0, steps = 0, samples = 0;
  bool skip_verify = false;
  auto* run = app.add_subcommand("run", "train a scenario preset and export artifacts");
  run->add_option("preset", preset_name, "one of: interaction_1d_velocity, interaction_1d_acceleration, obstacle_2d, heterogeneous_1d")
      ->required();
  run->add_option("--beta", beta, "interaction scaling exponent (0 or 1)");
  run->add_option("--obstacle", obstacle, "obstacle size: none|small|large");
  run->add_option("--model", model, "control model: velocity|acceleration");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--iters", iters, "training iterations override");
  run->add_option("--steps", steps, "time steps override");
  run->add_option("--samples", samples, "Monte Carlo samples override");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--skip-verify", skip_verify, "skip the exploitability certificate");

  // verify
  std::string checkpoint_path, verify_out;
  int br_iters = 1000;
  auto* verify = app.add_subcommand("verify", "exploitability certificate for a checkpoint");
  verify->add_option("checkpoint", checkpoint_path, "checkpoint.json path")->required();
  verify->add_option("--out", verify_out, "write certificate JSON here");
  verify->add_option("--br-iters", br_iters, "best-response iterations");
  verify->add_option("--seed", seed, "master seed");

  // alpha
  std::string config_path;
  auto* alpha = app.add_subcommand("alpha", "print the alpha bound of a game config");
  alpha->add_option("config", config_path, "game config JSON")->required();

  // export
  std::string export_ckpt, export_format = "csv", export_out;
  int export_steps = 50, export_samples = 1;
  auto* exp = app.add_subcommand("export", "replay a checkpoint and export trajectories");
  exp->add_option("checkpoint", export_ckpt, "checkpoint.json path")->required();
  exp->add_option("--format", export_format, "csv|json");
  exp->add_option("--out", export_out, "output file (stdout if omitted)");
  exp->add_option("--steps", export_steps, "time steps");
  exp->add_option("--samples", export_samples, "Monte Carlo samples");
  exp->add_option("--seed", seed, "rollout seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const cav::ScenarioPreset preset =
          resolve_preset(preset_name, beta, obstacle, model);
      cav::RunOptions opts;
      opts.seed = seed;
      opts.iterations = iters;
      opts.steps = steps;
      opts.samples = samples;
      opts.verify = !skip_verify;
      return cav::run_scenario(preset, out_dir, opts);
    }
    if (verify->parsed())
      return cmd_verify(checkpoint_path, verify_out, br_iters, seed);
    if (alpha->parsed()) {
      const cav::GameSpec spec =
          cav::game_spec_from_json(cav::load_json(config_path).contains("game")
                                       ? cav::load_json(config_path)["game"]
                                       : cav::load_json(config_path));
      std::cout << cav::alpha_bound(spec) << "\n";
      return 0;
    }
    if (exp->parsed())
      return cmd_export(export_ckpt, export_format, export_out, export_steps,
                        export_samples, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
