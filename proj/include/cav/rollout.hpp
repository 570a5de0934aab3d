#pragma once

#include "cav/game_model.hpp"
#include "cav/policy.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cav {

struct TimeGrid {
  std::vector<double> nodes;  // 0 = t_0 < ... < t_P = T

  static TimeGrid uniform(double horizon, int steps);

  int steps() const { return static_cast<int>(nodes.size()) - 1; }
  double horizon() const { return nodes.back(); }
  double dt(int l) const { return nodes[l + 1] - nodes[l]; }
};

// Brownian increments, [sample][player] -> steps x dim, already scaled by
// sqrt(dt). Streams are split per (sample, player) so adding players leaves
// existing players' noise untouched.
using NoiseBatch = std::vector<std::vector<Mat>>;

NoiseBatch sample_noise(const GameSpec& spec, const TimeGrid& grid, int samples,
                        std::uint64_t seed);

// Forced Monte Carlo size: one sample suffices when the dynamics carry no
// noise.
int effective_samples(const GameSpec& spec, int requested);

struct RolloutBatch {
  TimeGrid grid;
  std::vector<std::vector<Mat>> states;   // [m][i] -> (P+1) x state_dim
  std::vector<std::vector<Mat>> actions;  // [m][i] -> P x action_dim
  NoiseBatch noise;
  std::uint64_t seed = 0;

  int samples() const { return static_cast<int>(states.size()); }
  int players() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
};

// One Euler-Maruyama step of a single player's dynamics. Shared verbatim by
// the simulator and the autodiff tape.
Vec euler_step(const DynamicsKind& dyn, const Vec& state, const Vec& action,
               double dt, double sigma, const Vec& noise_increment);

RolloutBatch simulate(const GameSpec& spec, const PolicyNet& net,
                      const PolicyParams& theta, const TimeGrid& grid,
                      int samples, std::uint64_t seed);

RolloutBatch simulate_with_noise(const GameSpec& spec, const PolicyNet& net,
                                 const PolicyParams& theta, const TimeGrid& grid,
                                 const NoiseBatch& noise, std::uint64_t seed);

struct PotentialEstimate {
  double phi = 0.0;
  Vec per_player_cost;
  double min_pair_distance = 0.0;
  double max_pair_distance = 0.0;
  double obstacle_occupancy = 0.0;  // fraction of states inside an obstacle
};

// Left-endpoint Riemann sum of the stage cost plus the terminal cost,
// averaged over samples.
double accumulate_objective(const GameSpec& spec, const ObjectiveWeights& w,
                            const RolloutBatch& batch);

PotentialEstimate estimate_potential(const GameSpec& spec,
                                     const RolloutBatch& batch);

double estimate_player_objective(const GameSpec& spec,
                                 const RolloutBatch& batch, int player);

// Forward evaluation under fixed noise (common random numbers).
double evaluate_objective(const GameSpec& spec, const PolicyNet& net,
                          const PolicyParams& theta, const TimeGrid& grid,
                          const ObjectiveWeights& w, const NoiseBatch& noise);

// One row per (sample, player, step): t, state components, action components
// (actions empty on the terminal row).
void export_csv(const RolloutBatch& batch, std::ostream& os);

}  // namespace cav
