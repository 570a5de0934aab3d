#pragma once

#include "cav/game_model.hpp"
#include "cav/policy.hpp"
#include "cav/rollout.hpp"
#include "cav/trainer.hpp"
#include "cav/verification.hpp"

#include <json.hpp>

#include <string>

namespace cav {

using json = nlohmann::json;

json to_json(const GameSpec& spec);
GameSpec game_spec_from_json(const json& j);

json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const json& j);

json to_json(const PolicyArch& arch);
PolicyArch policy_arch_from_json(const json& j);

// Versioned checkpoint: architecture header plus the flat parameter vector,
// with the game embedded so a checkpoint replays standalone.
struct Checkpoint {
  GameSpec spec;
  PolicyArch arch;
  PolicyParams params;
};

json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const json& j);

void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

json report_to_json(const TrainReport& report);
json certificate_to_json(const NECertificate& cert);

void write_phi_history_csv(const TrainReport& report, const std::string& path);
void write_trajectories_csv(const RolloutBatch& batch, const std::string& path);

// Static trajectory figure. 1D games plot position vs. time; 2D games plot
// planar paths with the obstacle circle when one is present. Colors may be
// grouped (e.g. by vehicle type); an empty group vector means one color per
// player.
void write_trajectory_svg(const GameSpec& spec, const RolloutBatch& batch,
                          const std::vector<int>& color_group,
                          const std::string& path);

}  // namespace cav
