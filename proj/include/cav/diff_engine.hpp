#pragma once

#include "cav/game_model.hpp"
#include "cav/policy.hpp"
#include "cav/rollout.hpp"

#include <vector>

namespace cav {

// A rollout-defined scalar objective of the policy parameters: the Monte
// Carlo estimate of one ObjectiveWeights instance under fixed noise
// increments (pathwise / reparameterized view; the noise is a constant).
struct RolloutObjective {
  const GameSpec* spec = nullptr;
  const PolicyNet* net = nullptr;
  TimeGrid grid;
  ObjectiveWeights weights;
  const NoiseBatch* noise = nullptr;

  double operator()(const PolicyParams& theta) const;
};

struct GradResult {
  double value = 0.0;
  Vec gradient;
};

// Reverse-mode derivative through the unrolled discrete dynamics. The primal
// value follows the exact accumulation order of accumulate_objective, so it
// matches a plain evaluation bit for bit.
GradResult grad(const PolicyParams& theta, const RolloutObjective& objective);

// Central finite differences on the requested coordinates, common noise.
Vec finite_diff(const PolicyParams& theta, const RolloutObjective& objective,
                const std::vector<int>& coords, double step);

}  // namespace cav
