#pragma once

#include "cav/game_model.hpp"
#include "cav/policy.hpp"
#include "cav/trainer.hpp"

#include <string>
#include <vector>

namespace cav {

// Fully resolved experiment setup: game, training hyperparameters, policy
// architecture, plus a color grouping for the figure.
struct ScenarioPreset {
  std::string name;
  GameSpec spec;
  TrainConfig train;
  PolicyArch arch;
  std::vector<int> color_group;  // empty: one color per player
};

enum class ControlModel { Velocity, Acceleration };
enum class ObstacleSize { None, Small, Large };

// 10-vehicle 1D fleet, common start -1 and target 1, interaction strength
// scaled by beta in {0, 1}.
ScenarioPreset preset_interaction(ControlModel model, double beta);

// 10-vehicle 2D fleet under acceleration control with a circular obstacle at
// the origin (or none).
ScenarioPreset preset_obstacle(ObstacleSize size);

// 9-vehicle 1D fleet with large/medium/small types and separable asymmetric
// weights.
ScenarioPreset preset_heterogeneous(ControlModel model);

ScenarioPreset preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

struct RunOptions {
  std::uint64_t seed = 0;
  int iterations = 0;   // 0 keeps the preset default
  int steps = 0;
  int samples = 0;
  bool verify = true;   // exploitability certificate (slow)
};

// train -> verify -> export. Writes config.json, checkpoint.json,
// report.json, certificate.json (unless skipped), phi_history.csv,
// trajectories.csv, and figure.svg into out_dir.
int run_scenario(const ScenarioPreset& preset, const std::string& out_dir,
                 const RunOptions& opts);

}  // namespace cav
