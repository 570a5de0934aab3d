#include "cav/rollout.hpp"

#include "cav/rng.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cav {

TimeGrid TimeGrid::uniform(double horizon, int steps) {
  if (horizon <= 0.0 || steps < 1)
    throw std::invalid_argument("grid needs horizon > 0 and steps >= 1");
  TimeGrid g;
  g.nodes.resize(steps + 1);
  for (int l = 0; l <= steps; ++l)
    g.nodes[l] = horizon * static_cast<double>(l) / static_cast<double>(steps);
  g.nodes.back() = horizon;
  return g;
}

NoiseBatch sample_noise(const GameSpec& spec, const TimeGrid& grid, int samples,
                        std::uint64_t seed) {
  const int n = spec.num_players;
  const int d = spec.dynamics.dim;
  const int steps = grid.steps();
  NoiseBatch noise(samples);
  for (int m = 0; m < samples; ++m) {
    noise[m].resize(n);
    for (int i = 0; i < n; ++i) {
      auto rng = make_engine(seed, 0x0e15, static_cast<std::uint64_t>(m),
                             static_cast<std::uint64_t>(i));
      std::normal_distribution<double> gauss(0.0, 1.0);
      Mat dw(steps, d);
      for (int l = 0; l < steps; ++l) {
        const double sqdt = std::sqrt(grid.dt(l));
        for (int k = 0; k < d; ++k) dw(l, k) = sqdt * gauss(rng);
      }
      noise[m][i] = std::move(dw);
    }
  }
  return noise;
}

int effective_samples(const GameSpec& spec, int requested) {
  if (requested < 1) throw std::invalid_argument("need at least one sample");
  return spec.dynamics.deterministic() ? 1 : requested;
}

Vec euler_step(const DynamicsKind& dyn, const Vec& state, const Vec& action,
               double dt, double sigma, const Vec& noise_increment) {
  if (dyn.model == DynamicsModel::VelocityControl) return state + action * dt;
  const int d = dyn.dim;
  Vec next(2 * d);
  next.head(d) = state.head(d) + state.tail(d) * dt;
  next.tail(d) = state.tail(d) + action * dt + sigma * noise_increment;
  return next;
}

RolloutBatch simulate_with_noise(const GameSpec& spec, const PolicyNet& net,
                                 const PolicyParams& theta, const TimeGrid& grid,
                                 const NoiseBatch& noise, std::uint64_t seed) {
  const int n = spec.num_players;
  const int steps = grid.steps();
  const int sd = spec.dynamics.state_dim();
  const int ad = spec.dynamics.action_dim();
  const double horizon = grid.horizon();
  RolloutBatch batch;
  batch.grid = grid;
  batch.noise = noise;
  batch.seed = seed;
  const int samples = static_cast<int>(noise.size());
  batch.states.resize(samples);
  batch.actions.resize(samples);
  for (int m = 0; m < samples; ++m) {
    batch.states[m].assign(n, Mat(steps + 1, sd));
    batch.actions[m].assign(n, Mat(steps, ad));
    for (int i = 0; i < n; ++i) {
      Vec x = spec.initial_states[i];
      batch.states[m][i].row(0) = x.transpose();
      const double sigma = spec.dynamics.sigma(i);
      for (int l = 0; l < steps; ++l) {
        const double t_norm = grid.nodes[l] / horizon;
        Vec a = net.eval(theta.player_data(i), t_norm, x);
        batch.actions[m][i].row(l) = a.transpose();
        x = euler_step(spec.dynamics, x, a, grid.dt(l), sigma,
                       noise[m][i].row(l).transpose());
        if (!x.allFinite())
          throw std::runtime_error("non-finite state at step " +
                                   std::to_string(l + 1) + " for player " +
                                   std::to_string(i));
        batch.states[m][i].row(l + 1) = x.transpose();
      }
    }
  }
  return batch;
}

RolloutBatch simulate(const GameSpec& spec, const PolicyNet& net,
                      const PolicyParams& theta, const TimeGrid& grid,
                      int samples, std::uint64_t seed) {
  const int m_eff = effective_samples(spec, samples);
  return simulate_with_noise(spec, net, theta, grid,
                             sample_noise(spec, grid, m_eff, seed), seed);
}

namespace {

void gather(const RolloutBatch& batch, int m, int l, std::vector<Vec>& states,
            std::vector<Vec>& actions, bool with_actions) {
  const int n = batch.players();
  states.resize(n);
  if (with_actions) actions.resize(n);
  for (int i = 0; i < n; ++i) {
    states[i] = batch.states[m][i].row(l).transpose();
    if (with_actions) actions[i] = batch.actions[m][i].row(l).transpose();
  }
}

}  // namespace

double accumulate_objective(const GameSpec& spec, const ObjectiveWeights& w,
                            const RolloutBatch& batch) {
  const int samples = batch.samples();
  const int steps = batch.grid.steps();
  std::vector<Vec> states, actions;
  double acc = 0.0;
  for (int m = 0; m < samples; ++m) {
    double sample = 0.0;
    for (int l = 0; l < steps; ++l) {
      gather(batch, m, l, states, actions, true);
      sample += batch.grid.dt(l) * eval_stage_cost(spec, w, states, actions);
    }
    gather(batch, m, steps, states, actions, false);
    sample += eval_terminal_sum(spec, w, states);
    acc += sample;
  }
  return acc / static_cast<double>(samples);
}

PotentialEstimate estimate_potential(const GameSpec& spec,
                                     const RolloutBatch& batch) {
  PotentialEstimate est;
  est.phi = accumulate_objective(spec, potential_objective(spec), batch);
  const int n = spec.num_players;
  est.per_player_cost = Vec(n);
  for (int i = 0; i < n; ++i)
    est.per_player_cost(i) =
        accumulate_objective(spec, player_objective(spec, i), batch);

  const int d = spec.dynamics.dim;
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  long inside = 0, counted = 0;
  for (int m = 0; m < batch.samples(); ++m) {
    for (int l = 0; l <= batch.grid.steps(); ++l) {
      for (int i = 0; i < n; ++i) {
        const Vec pos_i = batch.states[m][i].row(l).head(d).transpose();
        for (int j = i + 1; j < n; ++j) {
          const Vec pos_j = batch.states[m][j].row(l).head(d).transpose();
          const double dist = (pos_i - pos_j).norm();
          dmin = std::min(dmin, dist);
          dmax = std::max(dmax, dist);
        }
        const auto& obs = spec.costs.players[i].obstacle;
        if (obs) {
          ++counted;
          Vec r = pos_i;
          if (obs->center.size() > 0) r -= obs->center;
          if (obs->curvature * r.squaredNorm() < 1.0) ++inside;
        }
      }
    }
  }
  if (n >= 2) {
    est.min_pair_distance = dmin;
    est.max_pair_distance = dmax;
  }
  est.obstacle_occupancy =
      counted > 0 ? static_cast<double>(inside) / static_cast<double>(counted)
                  : 0.0;
  return est;
}

double estimate_player_objective(const GameSpec& spec,
                                 const RolloutBatch& batch, int player) {
  return accumulate_objective(spec, player_objective(spec, player), batch);
}

double evaluate_objective(const GameSpec& spec, const PolicyNet& net,
                          const PolicyParams& theta, const TimeGrid& grid,
                          const ObjectiveWeights& w, const NoiseBatch& noise) {
  return accumulate_objective(
      spec, w, simulate_with_noise(spec, net, theta, grid, noise, 0));
}

void export_csv(const RolloutBatch& batch, std::ostream& os) {
  const int sd = batch.samples() ? static_cast<int>(batch.states[0][0].cols()) : 0;
  const int ad = batch.samples() ? static_cast<int>(batch.actions[0][0].cols()) : 0;
  os << "sample,player,step,t";
  for (int k = 0; k < sd; ++k) os << ",x" << k;
  for (int k = 0; k < ad; ++k) os << ",a" << k;
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << ',' << buf;
  };
  for (int m = 0; m < batch.samples(); ++m) {
    for (int i = 0; i < batch.players(); ++i) {
      for (int l = 0; l <= batch.grid.steps(); ++l) {
        os << m << ',' << i << ',' << l;
        put(batch.grid.nodes[l]);
        for (int k = 0; k < sd; ++k) put(batch.states[m][i](l, k));
        if (l < batch.grid.steps()) {
          for (int k = 0; k < ad; ++k) put(batch.actions[m][i](l, k));
        } else {
          for (int k = 0; k < ad; ++k) os << ',';
        }
        os << "\n";
      }
    }
  }
}

}  // namespace cav
