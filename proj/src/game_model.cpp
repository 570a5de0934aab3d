#include "cav/game_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cav {

bool DynamicsKind::deterministic() const {
  if (noise_scale.size() == 0) return true;
  return (noise_scale.array() == 0.0).all();
}

InteractionWeights InteractionWeights::uniform(int players, double value) {
  InteractionWeights w;
  w.lambda = Mat::Constant(players, players, value);
  w.lambda.diagonal().setZero();
  return w;
}

InteractionWeights InteractionWeights::separable(const Vec& gamma, const Vec& tau) {
  if (gamma.size() != tau.size())
    throw std::invalid_argument("separable tags must have equal length");
  InteractionWeights w;
  const int n = static_cast<int>(gamma.size());
  w.lambda = gamma * tau.transpose();  // lambda_ij = gamma_i tau_j
  w.lambda.diagonal().setZero();
  w.gamma = gamma;
  w.tau = tau;
  return w;
}

void InteractionWeights::validate() const {
  const int n = players();
  if (lambda.cols() != n) throw std::invalid_argument("lambda must be square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && lambda(i, j) < 0.0)
        throw std::invalid_argument("lambda entries must be nonnegative");
  if (gamma.has_value() != tau.has_value())
    throw std::invalid_argument("gamma and tau must be given together");
  if (has_separable_tags()) {
    if (gamma->size() != n || tau->size() != n)
      throw std::invalid_argument("separable tag length mismatch");
    if ((gamma->array() <= 0.0).any() || (tau->array() <= 0.0).any())
      throw std::invalid_argument("separable tags must be positive");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && lambda(i, j) != (*gamma)(i) * (*tau)(j))
          throw std::invalid_argument("lambda inconsistent with separable tags");
  }
}

InteractionWeights symmetrize_weights(const InteractionWeights& w) {
  InteractionWeights out;
  out.lambda = 0.5 * (w.lambda + w.lambda.transpose());
  out.lambda.diagonal().setZero();
  return out;
}

Kernel Kernel::scaled_radial(double beta, int players, int dim) {
  Kernel k;
  k.shape = Shape::ScaledRadial;
  k.beta = beta;
  k.players = players;
  k.dim = dim;
  return k;
}

Kernel Kernel::inverse_quadratic(double c) {
  Kernel k;
  k.shape = Shape::InverseQuadratic;
  k.scale_c = c;
  return k;
}

double Kernel::length_scale() const {
  if (shape == Shape::ScaledRadial)
    return std::pow(static_cast<double>(players), beta / static_cast<double>(dim));
  return scale_c;
}

double eval_kernel(const Kernel& k, const Vec& z) {
  const double s = k.length_scale();
  return 1.0 / (s * s * z.squaredNorm() + 1.0);
}

namespace {

Vec obstacle_offset(const ObstacleCost& o, const Vec& x) {
  if (o.center.size() == 0) return x;
  return x - o.center;
}

}  // namespace

double eval_obstacle(const ObstacleCost& o, const Vec& x) {
  const Vec r = obstacle_offset(o, x);
  const double u = o.sharpness * (1.0 - o.curvature * r.squaredNorm());
  // u <= sharpness, so exp(u) cannot overflow for sane parameters.
  return o.amplitude * (1.0 - 1.0 / (1.0 + std::exp(u)));
}

Vec obstacle_gradient(const ObstacleCost& o, const Vec& x) {
  const Vec r = obstacle_offset(o, x);
  const double u = o.sharpness * (1.0 - o.curvature * r.squaredNorm());
  const double e = std::exp(u);
  const double dsig = e / ((1.0 + e) * (1.0 + e));  // d/du of 1 - 1/(1+e^u)
  return (-2.0 * o.amplitude * o.sharpness * o.curvature * dsig) * r;
}

void GameSpec::validate() const {
  const int n = num_players;
  if (n < 1) throw std::invalid_argument("need at least one player");
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be positive");
  if (dynamics.dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (dynamics.noise_scale.size() != 0) {
    if (dynamics.noise_scale.size() != n)
      throw std::invalid_argument("noise_scale length must equal player count");
    if ((dynamics.noise_scale.array() < 0.0).any())
      throw std::invalid_argument("noise scales must be nonnegative");
    if (dynamics.model == DynamicsModel::VelocityControl &&
        !dynamics.deterministic())
      throw std::invalid_argument("velocity-control dynamics are noiseless");
  }
  if (weights.players() != n)
    throw std::invalid_argument("weights size must equal player count");
  weights.validate();
  if (static_cast<int>(costs.players.size()) != n)
    throw std::invalid_argument("costs length must equal player count");
  for (const auto& pc : costs.players) {
    if (pc.action_cost_coeff < 0.0 || pc.terminal_coeff < 0.0)
      throw std::invalid_argument("cost coefficients must be nonnegative");
    if (pc.terminal_coeff > 0.0 && pc.target.size() != dynamics.dim)
      throw std::invalid_argument("target dimension mismatch");
    if (pc.obstacle && pc.obstacle->center.size() != 0 &&
        pc.obstacle->center.size() != dynamics.dim)
      throw std::invalid_argument("obstacle center dimension mismatch");
    if (pc.obstacle && pc.obstacle->curvature <= 0.0)
      throw std::invalid_argument("obstacle curvature must be positive");
  }
  if (static_cast<int>(initial_states.size()) != n)
    throw std::invalid_argument("initial_states length must equal player count");
  for (const auto& xi : initial_states)
    if (xi.size() != dynamics.state_dim())
      throw std::invalid_argument("initial state dimension mismatch");
}

double alpha_bound(const GameSpec& g) {
  const int n = g.num_players;
  double worst_row = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      row += std::abs(g.weights.lambda(i, j) - g.weights.lambda(j, i));
    }
    worst_row = std::max(worst_row, row);
  }
  return g.horizon * g.kernel.sup_norm() * worst_row;
}

double eval_running_cost(const GameSpec& g, int player, const Vec& state,
                         const Vec& action) {
  const auto& pc = g.costs.players[player];
  double v = pc.action_cost_coeff * action.squaredNorm();
  if (pc.obstacle)
    v += eval_obstacle(*pc.obstacle, state.head(g.dynamics.dim));
  return v;
}

double eval_terminal_cost(const GameSpec& g, int player, const Vec& state) {
  const auto& pc = g.costs.players[player];
  if (pc.terminal_coeff == 0.0) return 0.0;
  return pc.terminal_coeff *
         (state.head(g.dynamics.dim) - pc.target).squaredNorm();
}

ObjectiveWeights potential_objective(const GameSpec& g) {
  const int n = g.num_players;
  ObjectiveWeights w;
  w.running_scale = Vec::Ones(n);
  w.terminal_scale = Vec::Ones(n);
  w.pair_coeff = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      w.pair_coeff(i, j) = 0.5 * (g.weights.lambda(i, j) + g.weights.lambda(j, i));
  return w;
}

ObjectiveWeights rescaled_objective(const GameSpec& g) {
  if (!g.weights.has_separable_tags())
    throw std::invalid_argument("rescaled potential needs separable weights");
  const Vec& gamma = *g.weights.gamma;
  const Vec& tau = *g.weights.tau;
  const int n = g.num_players;
  ObjectiveWeights w;
  w.running_scale = (tau.array() / gamma.array()).matrix();
  w.terminal_scale = w.running_scale;
  w.pair_coeff = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) w.pair_coeff(i, j) = tau(i) * tau(j);
  return w;
}

ObjectiveWeights player_objective(const GameSpec& g, int player) {
  const int n = g.num_players;
  ObjectiveWeights w;
  w.running_scale = Vec::Zero(n);
  w.terminal_scale = Vec::Zero(n);
  w.running_scale(player) = 1.0;
  w.terminal_scale(player) = 1.0;
  w.pair_coeff = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (j == player) continue;
    w.pair_coeff(std::min(player, j), std::max(player, j)) =
        g.weights.lambda(player, j);
  }
  return w;
}

double eval_stage_cost(const GameSpec& g, const ObjectiveWeights& w,
                       const std::vector<Vec>& states,
                       const std::vector<Vec>& actions) {
  const int n = g.num_players;
  const int d = g.dynamics.dim;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rs = w.running_scale(i);
    if (rs == 0.0) continue;
    acc += rs * eval_running_cost(g, i, states[i], actions[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = w.pair_coeff(i, j);
      if (c == 0.0) continue;
      acc += c * eval_kernel(g.kernel, states[i].head(d) - states[j].head(d));
    }
  }
  return acc;
}

double eval_terminal_sum(const GameSpec& g, const ObjectiveWeights& w,
                         const std::vector<Vec>& states) {
  double acc = 0.0;
  for (int i = 0; i < g.num_players; ++i) {
    const double ts = w.terminal_scale(i);
    if (ts == 0.0) continue;
    acc += ts * eval_terminal_cost(g, i, states[i]);
  }
  return acc;
}

namespace {

Integrands make_integrands(const GameSpec& g, const ObjectiveWeights& w) {
  Integrands out;
  out.stage = [g, w](const std::vector<Vec>& x, const std::vector<Vec>& a) {
    return eval_stage_cost(g, w, x, a);
  };
  out.terminal = [g, w](const std::vector<Vec>& x) {
    return eval_terminal_sum(g, w, x);
  };
  return out;
}

}  // namespace

Integrands potential_integrands(const GameSpec& g) {
  return make_integrands(g, potential_objective(g));
}

Integrands rescaled_integrands(const GameSpec& g) {
  return make_integrands(g, rescaled_objective(g));
}

}  // namespace cav
