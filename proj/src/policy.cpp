#include "cav/policy.hpp"

#include "cav/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cav {

PolicyNet::PolicyNet(int state_dim_, int action_dim_, const PolicyArch& arch)
    : state_dim(state_dim_), action_dim(action_dim_) {
  if (state_dim < 1 || action_dim < 1)
    throw std::invalid_argument("policy dimensions must be positive");
  widths.push_back(1 + state_dim);  // time plus own state
  for (int h : widths_check(arch)) widths.push_back(h);
  widths.push_back(action_dim);
  int off = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    layer.cols = widths[l];
    layer.rows = widths[l + 1];
    layer.w_off = off;
    off += layer.rows * layer.cols;
    layer.b_off = off;
    off += layer.rows;
    layers.push_back(layer);
  }
  params_per_player = off;
}

std::vector<int> PolicyNet::widths_check(const PolicyArch& arch) {
  for (int h : arch.hidden)
    if (h < 1) throw std::invalid_argument("hidden widths must be positive");
  return arch.hidden;
}

void apply_tanh(Vec& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = std::tanh(v(k));
}

Vec PolicyNet::eval(const double* theta, double t_norm, const Vec& state) const {
  Vec h(1 + state_dim);
  h(0) = t_norm;
  h.tail(state_dim) = state;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& L = layers[l];
    Vec z = Eigen::Map<const Mat>(theta + L.w_off, L.rows, L.cols) * h +
            Eigen::Map<const Vec>(theta + L.b_off, L.rows);
    if (l + 1 < layers.size()) apply_tanh(z);
    h = std::move(z);
  }
  return h;
}

PolicyParams zero_params(const PolicyNet& net, int players) {
  PolicyParams p;
  p.flat = Vec::Zero(static_cast<Eigen::Index>(players) * net.params_per_player);
  p.offsets.resize(players + 1);
  for (int i = 0; i <= players; ++i) p.offsets[i] = i * net.params_per_player;
  return p;
}

PolicyParams init_params(const PolicyNet& net, int players, std::uint64_t seed) {
  PolicyParams p = zero_params(net, players);
  for (int i = 0; i < players; ++i) {
    auto rng = make_engine(seed, 0x1a17, static_cast<std::uint64_t>(i));
    double* slice = p.flat.data() + p.offsets[i];
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      const auto& L = net.layers[l];
      const bool output_layer = (l + 1 == net.layers.size());
      const double bound = 1.0 / std::sqrt(static_cast<double>(L.cols));
      const double scale = output_layer ? 0.1 : 1.0;
      std::uniform_real_distribution<double> uni(-bound, bound);
      for (int k = 0; k < L.rows * L.cols; ++k)
        slice[L.w_off + k] = scale * uni(rng);
      // biases start at zero; in particular the output bias, so initial
      // actions are near zero
    }
  }
  return p;
}

double lipschitz_bound(const PolicyNet& net, const double* theta) {
  double prod = 1.0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& L = net.layers[l];
    Eigen::Map<const Mat> W(theta + L.w_off, L.rows, L.cols);
    // skip the time column of the first layer: the bound is w.r.t. the state
    const int c0 = (l == 0) ? 1 : 0;
    double norm = 0.0;
    for (int r = 0; r < L.rows; ++r) {
      double row = 0.0;
      for (int c = c0; c < L.cols; ++c) row += std::abs(W(r, c));
      norm = std::max(norm, row);
    }
    prod *= norm;
  }
  return prod;
}

}  // namespace cav
