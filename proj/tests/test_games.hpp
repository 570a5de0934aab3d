#pragma once

#include "cav/game_model.hpp"
#include "cav/policy.hpp"

namespace cav::testutil {

inline GameSpec velocity_game(int players, int dim, const Mat& lambda,
                              double action_coeff = 0.0,
                              double terminal_coeff = 0.0,
                              double target = 0.0, double start = 0.0) {
  GameSpec g;
  g.num_players = players;
  g.dynamics.model = DynamicsModel::VelocityControl;
  g.dynamics.dim = dim;
  g.weights.lambda = lambda;
  g.weights.lambda.diagonal().setZero();
  g.kernel = Kernel::scaled_radial(0.0, players, dim);
  g.horizon = 1.0;
  for (int i = 0; i < players; ++i) {
    PlayerCost pc;
    pc.action_cost_coeff = action_coeff;
    pc.terminal_coeff = terminal_coeff;
    pc.target = Vec::Constant(dim, target);
    g.costs.players.push_back(pc);
    g.initial_states.push_back(Vec::Constant(dim, start));
  }
  return g;
}

inline GameSpec acceleration_game(int players, int dim, double sigma,
                                  const Mat& lambda) {
  GameSpec g = velocity_game(players, dim, lambda);
  g.dynamics.model = DynamicsModel::AccelerationControl;
  if (sigma > 0.0) g.dynamics.noise_scale = Vec::Constant(players, sigma);
  for (auto& xi : g.initial_states) xi = Vec::Zero(2 * dim);
  return g;
}

// Zero-hidden-layer net whose bias pins a constant action.
inline PolicyParams constant_policy(const PolicyNet& net, int players,
                                    double action) {
  PolicyParams p = zero_params(net, players);
  for (int i = 0; i < players; ++i) {
    const auto& out = net.layers.back();
    for (int r = 0; r < out.rows; ++r)
      p.flat(p.player_offset(i) + out.b_off + r) = action;
  }
  return p;
}

}  // namespace cav::testutil
