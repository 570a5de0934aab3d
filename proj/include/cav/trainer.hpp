#pragma once

#include "cav/diff_engine.hpp"
#include "cav/game_model.hpp"
#include "cav/policy.hpp"
#include "cav/rollout.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cav {

struct TrainConfig {
  int iterations = 2000;
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int samples = 64;  // forced to 1 when the dynamics are deterministic
  int steps = 50;
  std::uint64_t seed = 0;
  bool resample_noise = true;  // fresh noise each iteration, frozen within
  int checkpoint_every = 0;    // 0 disables
  double grad_tolerance = 0.0;

  void validate() const;
};

struct TrainReport {
  std::vector<double> phi_history;
  std::vector<double> grad_norm_history;
  double wall_seconds = 0.0;
  PolicyParams final_params;
  PotentialEstimate final_estimate;
  std::string stop_reason;  // "iterations", "tolerance", or "diverged"
};

using CheckpointHook = std::function<void(int iteration, const PolicyParams&)>;

// Minimizes the Monte Carlo potential estimate over the joint parameter
// vector. Deterministic for a fixed config.
TrainReport train(const GameSpec& spec, const PolicyNet& net,
                  const TrainConfig& cfg, const CheckpointHook& hook = {});

// Warm start: same loop, but from `start` instead of a fresh
// initialization. Useful for fine-tuning at a lower learning rate.
TrainReport train_from(const GameSpec& spec, const PolicyNet& net,
                       const PolicyParams& start, const TrainConfig& cfg,
                       const CheckpointHook& hook = {});

// Same loop, but the objective is player i's own cost and only player i's
// slice moves; opponents stay frozen at `incumbent`.
TrainReport train_best_response(const GameSpec& spec, const PolicyNet& net,
                                const PolicyParams& incumbent, int player,
                                const TrainConfig& cfg);

}  // namespace cav
