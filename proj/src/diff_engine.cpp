#include "cav/diff_engine.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cav {

double RolloutObjective::operator()(const PolicyParams& theta) const {
  if (!spec || !net || !noise)
    throw std::invalid_argument("rollout objective is not fully bound");
  return accumulate_objective(
      *spec, weights, simulate_with_noise(*spec, *net, theta, grid, *noise, 0));
}

namespace {

enum class Op {
  Leaf,
  WithTime,
  Affine,
  Tanh,
  Step,
  ActionCost,
  TerminalCost,
  Obstacle,
  KernelPair,
  AddScaled,
  DivConst,
};

struct Node {
  Op op;
  int a = -1, b = -1;
  Vec value;
  Vec adjoint;
  int w_off = -1, b_off = -1, rows = 0, cols = 0;  // Affine
  double c0 = 0.0, c1 = 0.0;
  Vec aux;  // noise increment / terminal target
  const ObstacleCost* obstacle = nullptr;
  const Kernel* kernel = nullptr;
  const DynamicsKind* dyn = nullptr;
  int dim = 0;
};

class Tape {
 public:
  explicit Tape(const PolicyParams& theta) : theta_(theta) {}

  int leaf(Vec v) {
    return push(Node{.op = Op::Leaf, .value = std::move(v)});
  }

  int scalar_zero() { return leaf(Vec::Zero(1)); }

  int with_time(double t, int x) {
    Node n{.op = Op::WithTime, .a = x};
    const auto& xv = nodes_[x].value;
    n.value.resize(xv.size() + 1);
    n.value(0) = t;
    n.value.tail(xv.size()) = xv;
    return push(std::move(n));
  }

  int affine(int w_off, int b_off, int rows, int cols, int x) {
    Node n{.op = Op::Affine, .a = x, .w_off = w_off, .b_off = b_off,
           .rows = rows, .cols = cols};
    const double* th = theta_.flat.data();
    n.value = Eigen::Map<const Mat>(th + w_off, rows, cols) * nodes_[x].value +
              Eigen::Map<const Vec>(th + b_off, rows);
    return push(std::move(n));
  }

  int tanh_node(int x) {
    Node n{.op = Op::Tanh, .a = x, .value = nodes_[x].value};
    apply_tanh(n.value);
    return push(std::move(n));
  }

  int step(const DynamicsKind& dyn, int x, int act, double dt, double sigma,
           Vec noise_increment) {
    Node n{.op = Op::Step, .a = x, .b = act, .c0 = dt, .c1 = sigma,
           .aux = std::move(noise_increment), .dyn = &dyn, .dim = dyn.dim};
    n.value = euler_step(dyn, nodes_[x].value, nodes_[act].value, dt, sigma, n.aux);
    return push(std::move(n));
  }

  int action_cost(int act, double coeff) {
    Node n{.op = Op::ActionCost, .a = act, .c0 = coeff};
    n.value = Vec::Constant(1, coeff * nodes_[act].value.squaredNorm());
    return push(std::move(n));
  }

  int terminal_cost(int x, double coeff, const Vec& target, int dim) {
    Node n{.op = Op::TerminalCost, .a = x, .c0 = coeff, .aux = target, .dim = dim};
    n.value = Vec::Constant(
        1, coeff * (nodes_[x].value.head(dim) - target).squaredNorm());
    return push(std::move(n));
  }

  int obstacle_node(int x, const ObstacleCost& o, int dim) {
    Node n{.op = Op::Obstacle, .a = x, .obstacle = &o, .dim = dim};
    n.value = Vec::Constant(1, eval_obstacle(o, nodes_[x].value.head(dim)));
    return push(std::move(n));
  }

  int kernel_pair(int xi, int xj, const Kernel& k, int dim) {
    Node n{.op = Op::KernelPair, .a = xi, .b = xj, .kernel = &k, .dim = dim};
    n.value = Vec::Constant(
        1, eval_kernel(k, nodes_[xi].value.head(dim) - nodes_[xj].value.head(dim)));
    return push(std::move(n));
  }

  int add_scaled(int a, int b, double c0, double c1) {
    Node n{.op = Op::AddScaled, .a = a, .b = b, .c0 = c0, .c1 = c1};
    n.value = Vec::Constant(1, c0 * nodes_[a].value(0) + c1 * nodes_[b].value(0));
    return push(std::move(n));
  }

  int div_const(int a, double c) {
    Node n{.op = Op::DivConst, .a = a, .c0 = c};
    n.value = Vec::Constant(1, nodes_[a].value(0) / c);
    return push(std::move(n));
  }

  double value(int id) const { return nodes_[id].value(0); }

  Vec backward(int out) {
    Vec grad = Vec::Zero(theta_.size());
    for (auto& n : nodes_) n.adjoint = Vec::Zero(n.value.size());
    nodes_[out].adjoint(0) = 1.0;
    const double* th = theta_.flat.data();
    (void)th;
    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
      Node& n = nodes_[id];
      switch (n.op) {
        case Op::Leaf:
          break;
        case Op::WithTime: {
          auto& x = nodes_[n.a];
          x.adjoint += n.adjoint.tail(x.value.size());
          break;
        }
        case Op::Affine: {
          auto& x = nodes_[n.a];
          Eigen::Map<const Mat> W(theta_.flat.data() + n.w_off, n.rows, n.cols);
          Eigen::Map<Mat>(grad.data() + n.w_off, n.rows, n.cols).noalias() +=
              n.adjoint * x.value.transpose();
          grad.segment(n.b_off, n.rows) += n.adjoint;
          x.adjoint.noalias() += W.transpose() * n.adjoint;
          break;
        }
        case Op::Tanh: {
          auto& x = nodes_[n.a];
          x.adjoint.array() +=
              n.adjoint.array() * (1.0 - n.value.array().square());
          break;
        }
        case Op::Step: {
          auto& x = nodes_[n.a];
          auto& act = nodes_[n.b];
          if (n.dyn->model == DynamicsModel::VelocityControl) {
            x.adjoint += n.adjoint;
            act.adjoint += n.c0 * n.adjoint;
          } else {
            const int d = n.dim;
            x.adjoint.head(d) += n.adjoint.head(d);
            x.adjoint.tail(d) += n.c0 * n.adjoint.head(d) + n.adjoint.tail(d);
            act.adjoint += n.c0 * n.adjoint.tail(d);
          }
          break;
        }
        case Op::ActionCost: {
          auto& act = nodes_[n.a];
          act.adjoint += (2.0 * n.c0 * n.adjoint(0)) * act.value;
          break;
        }
        case Op::TerminalCost: {
          auto& x = nodes_[n.a];
          x.adjoint.head(n.dim) +=
              (2.0 * n.c0 * n.adjoint(0)) * (x.value.head(n.dim) - n.aux);
          break;
        }
        case Op::Obstacle: {
          auto& x = nodes_[n.a];
          x.adjoint.head(n.dim) +=
              n.adjoint(0) * obstacle_gradient(*n.obstacle, x.value.head(n.dim));
          break;
        }
        case Op::KernelPair: {
          auto& xi = nodes_[n.a];
          auto& xj = nodes_[n.b];
          const Vec z = xi.value.head(n.dim) - xj.value.head(n.dim);
          const double s = n.kernel->length_scale();
          const double u = s * s * z.squaredNorm() + 1.0;
          const Vec dz = (-2.0 * s * s / (u * u)) * z;
          xi.adjoint.head(n.dim) += n.adjoint(0) * dz;
          xj.adjoint.head(n.dim) -= n.adjoint(0) * dz;
          break;
        }
        case Op::AddScaled: {
          nodes_[n.a].adjoint(0) += n.c0 * n.adjoint(0);
          nodes_[n.b].adjoint(0) += n.c1 * n.adjoint(0);
          break;
        }
        case Op::DivConst: {
          nodes_[n.a].adjoint(0) += n.adjoint(0) / n.c0;
          break;
        }
        default:
          throw std::logic_error("unregistered primitive on tape");
      }
    }
    return grad;
  }

 private:
  int push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  const PolicyParams& theta_;
  std::vector<Node> nodes_;
};

}  // namespace

GradResult grad(const PolicyParams& theta, const RolloutObjective& obj) {
  if (!obj.spec || !obj.net || !obj.noise)
    throw std::invalid_argument("rollout objective is not fully bound");
  const GameSpec& g = *obj.spec;
  const PolicyNet& net = *obj.net;
  const NoiseBatch& noise = *obj.noise;
  const int n = g.num_players;
  const int d = g.dynamics.dim;
  const int steps = obj.grid.steps();
  const int samples = static_cast<int>(noise.size());
  const double horizon = obj.grid.horizon();

  Tape tape(theta);
  int total = tape.scalar_zero();
  std::vector<int> xnode(n), anode(n);
  for (int m = 0; m < samples; ++m) {
    for (int i = 0; i < n; ++i) xnode[i] = tape.leaf(g.initial_states[i]);
    int sacc = tape.scalar_zero();
    for (int l = 0; l < steps; ++l) {
      const double t_norm = obj.grid.nodes[l] / horizon;
      const double dt = obj.grid.dt(l);
      for (int i = 0; i < n; ++i) {
        int h = tape.with_time(t_norm, xnode[i]);
        const int base = theta.player_offset(i);
        for (std::size_t li = 0; li < net.layers.size(); ++li) {
          const auto& L = net.layers[li];
          h = tape.affine(base + L.w_off, base + L.b_off, L.rows, L.cols, h);
          if (li + 1 < net.layers.size()) h = tape.tanh_node(h);
        }
        anode[i] = h;
      }
      // stage cost; mirrors eval_stage_cost term by term
      int facc = tape.scalar_zero();
      for (int i = 0; i < n; ++i) {
        const double rs = obj.weights.running_scale(i);
        if (rs == 0.0) continue;
        const auto& pc = g.costs.players[i];
        int f = tape.action_cost(anode[i], pc.action_cost_coeff);
        if (pc.obstacle) {
          int ob = tape.obstacle_node(xnode[i], *pc.obstacle, d);
          f = tape.add_scaled(f, ob, 1.0, 1.0);
        }
        facc = tape.add_scaled(facc, f, 1.0, rs);
      }
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double c = obj.weights.pair_coeff(i, j);
          if (c == 0.0) continue;
          int kn = tape.kernel_pair(xnode[i], xnode[j], g.kernel, d);
          facc = tape.add_scaled(facc, kn, 1.0, c);
        }
      }
      sacc = tape.add_scaled(sacc, facc, 1.0, dt);
      for (int i = 0; i < n; ++i) {
        xnode[i] = tape.step(g.dynamics, xnode[i], anode[i], dt,
                             g.dynamics.sigma(i), noise[m][i].row(l).transpose());
      }
    }
    // terminal cost; mirrors eval_terminal_sum
    int gacc = tape.scalar_zero();
    for (int i = 0; i < n; ++i) {
      const double ts = obj.weights.terminal_scale(i);
      if (ts == 0.0) continue;
      const auto& pc = g.costs.players[i];
      int tc = pc.terminal_coeff == 0.0
                   ? tape.scalar_zero()
                   : tape.terminal_cost(xnode[i], pc.terminal_coeff, pc.target, d);
      gacc = tape.add_scaled(gacc, tc, 1.0, ts);
    }
    sacc = tape.add_scaled(sacc, gacc, 1.0, 1.0);
    total = tape.add_scaled(total, sacc, 1.0, 1.0);
  }
  const int out = tape.div_const(total, static_cast<double>(samples));

  GradResult res;
  res.value = tape.value(out);
  res.gradient = tape.backward(out);
  return res;
}

Vec finite_diff(const PolicyParams& theta, const RolloutObjective& obj,
                const std::vector<int>& coords, double step) {
  if (step <= 0.0) throw std::invalid_argument("step must be positive");
  PolicyParams probe = theta;
  Vec out(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const int c = coords[k];
    const double saved = probe.flat(c);
    probe.flat(c) = saved + step;
    const double up = obj(probe);
    probe.flat(c) = saved - step;
    const double down = obj(probe);
    probe.flat(c) = saved;
    out(static_cast<Eigen::Index>(k)) = (up - down) / (2.0 * step);
  }
  return out;
}

}  // namespace cav
