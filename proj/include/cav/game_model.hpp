#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace cav {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class DynamicsModel { VelocityControl, AccelerationControl };

// Single-integrator (state = position, action = velocity) or double-integrator
// (state = (position, velocity), action = acceleration) per-player dynamics.
// Diffusion is constant and diagonal; only the velocity block of the
// double integrator is driven by noise.
struct DynamicsKind {
  DynamicsModel model = DynamicsModel::VelocityControl;
  int dim = 1;      // spatial dimension
  Vec noise_scale;  // per-player sigma; empty means all zero

  int state_dim() const {
    return model == DynamicsModel::AccelerationControl ? 2 * dim : dim;
  }
  int action_dim() const { return dim; }
  double sigma(int player) const {
    return noise_scale.size() > 0 ? noise_scale(player) : 0.0;
  }
  bool deterministic() const;
};

// Pairwise interaction weights lambda_ij >= 0, diagonal ignored. When the
// weights factor as lambda_ij = gamma_i * tau_j the tags are kept so the
// rescaled potential can be formed.
struct InteractionWeights {
  Mat lambda;
  std::optional<Vec> gamma, tau;

  static InteractionWeights uniform(int players, double value);
  static InteractionWeights separable(const Vec& gamma, const Vec& tau);

  int players() const { return static_cast<int>(lambda.rows()); }
  bool has_separable_tags() const { return gamma.has_value() && tau.has_value(); }
  void validate() const;
};

InteractionWeights symmetrize_weights(const InteractionWeights& w);

// Radial interaction kernel K(z) = 1/(s^2 |z|^2 + 1). The two shapes differ
// only in the length scale s: ScaledRadial uses s = N^{beta/d}, so beta tunes
// how interaction range shrinks with the player count; InverseQuadratic pins
// s = c directly. Even in z by construction, bounded by sup_norm = 1.
struct Kernel {
  enum class Shape { ScaledRadial, InverseQuadratic };
  Shape shape = Shape::ScaledRadial;
  double beta = 0.0;  // ScaledRadial
  int players = 1;    // ScaledRadial
  int dim = 1;        // ScaledRadial
  double scale_c = 1.0;  // InverseQuadratic

  static Kernel scaled_radial(double beta, int players, int dim);
  static Kernel inverse_quadratic(double c);

  double length_scale() const;
  double sup_norm() const { return 1.0; }  // profile peaks at z = 0
};

double eval_kernel(const Kernel& k, const Vec& z);

// Smooth obstacle penalty
//   h(x) = A * (1 - 1/(1 + exp[s (1 - M |x - center|^2)])),
// a differentiable stand-in for forbidding passage through the ball of
// radius 1/sqrt(M) around center. Value lies in (0, A) and decreases
// strictly with distance from the center.
struct ObstacleCost {
  double amplitude = 1000.0;
  double sharpness = 10.0;
  double curvature = 1.0;
  Vec center;  // empty means origin
};

double eval_obstacle(const ObstacleCost& o, const Vec& x);
Vec obstacle_gradient(const ObstacleCost& o, const Vec& x);

// Player cost pieces: f_i(x, a) = c_i |a|^2 + h(pos(x)),
// g_i(x) = w_i |pos(x) - target|^2. Costs act on the position block only.
struct PlayerCost {
  double action_cost_coeff = 0.0;
  double terminal_coeff = 0.0;
  Vec target;
  std::optional<ObstacleCost> obstacle;
};

struct CostSpec {
  std::vector<PlayerCost> players;
};

struct GameSpec {
  int num_players = 1;
  DynamicsKind dynamics;
  InteractionWeights weights;
  Kernel kernel;
  CostSpec costs;
  double horizon = 1.0;
  std::vector<Vec> initial_states;

  void validate() const;
};

// T * ||K||_inf * max_i sum_{j != i} |lambda_ij - lambda_ji|; zero iff the
// weights are symmetric.
double alpha_bound(const GameSpec& g);

double eval_running_cost(const GameSpec& g, int player, const Vec& state,
                         const Vec& action);
double eval_terminal_cost(const GameSpec& g, int player, const Vec& state);

// A per-objective weighting of the shared cost structure: how strongly each
// player's running/terminal cost enters, plus one coefficient per unordered
// pair (upper triangle used). The potential, the rescaled potential, and each
// individual objective J_i are all instances.
struct ObjectiveWeights {
  Vec running_scale;
  Vec terminal_scale;
  Mat pair_coeff;
};

ObjectiveWeights potential_objective(const GameSpec& g);
ObjectiveWeights rescaled_objective(const GameSpec& g);  // needs separable tags
ObjectiveWeights player_objective(const GameSpec& g, int player);

// Canonical evaluation of an ObjectiveWeights instance on a joint
// state/action. Every other evaluation path (Monte Carlo estimate, autodiff
// tape) mirrors the exact accumulation order used here.
double eval_stage_cost(const GameSpec& g, const ObjectiveWeights& w,
                       const std::vector<Vec>& states,
                       const std::vector<Vec>& actions);
double eval_terminal_sum(const GameSpec& g, const ObjectiveWeights& w,
                         const std::vector<Vec>& states);

// Closed-form integrands (F, G) as callables over joint states/actions.
struct Integrands {
  std::function<double(const std::vector<Vec>&, const std::vector<Vec>&)> stage;
  std::function<double(const std::vector<Vec>&)> terminal;
};

Integrands potential_integrands(const GameSpec& g);
Integrands rescaled_integrands(const GameSpec& g);

}  // namespace cav
