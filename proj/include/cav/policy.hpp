#pragma once

#include "cav/game_model.hpp"

#include <cstdint>
#include <vector>

namespace cav {

struct PolicyArch {
  std::vector<int> hidden = {32, 32};
};

// Feed-forward Markov policy (t/T, x_i) -> a_i with tanh hidden layers.
// All players share the architecture; each owns an independent slice of the
// flat parameter vector. Evaluation is pure and deterministic.
struct PolicyNet {
  struct Layer {
    int w_off;  // offsets within one player's slice, W column-major then b
    int b_off;
    int rows;
    int cols;
  };

  int state_dim = 0;
  int action_dim = 0;
  std::vector<int> widths;  // input, hidden..., output
  std::vector<Layer> layers;
  int params_per_player = 0;

  PolicyNet() = default;
  PolicyNet(int state_dim, int action_dim, const PolicyArch& arch);

  static std::vector<int> widths_check(const PolicyArch& arch);

  // theta points at this player's slice.
  Vec eval(const double* theta, double t_norm, const Vec& state) const;
};

// elementwise std::tanh; shared with the tape so primal values match bitwise
void apply_tanh(Vec& v);

struct PolicyParams {
  Vec flat;
  std::vector<int> offsets;  // length players+1

  int players() const { return static_cast<int>(offsets.size()) - 1; }
  int size() const { return static_cast<int>(flat.size()); }
  int player_offset(int i) const { return offsets[i]; }
  int player_size(int i) const { return offsets[i + 1] - offsets[i]; }
  const double* player_data(int i) const { return flat.data() + offsets[i]; }
};

PolicyParams zero_params(const PolicyNet& net, int players);

// Scaled-uniform fan-in initialization; output-layer weights are shrunk and
// its bias zeroed so initial actions stay near zero.
PolicyParams init_params(const PolicyNet& net, int players, std::uint64_t seed);

// Empirical-Lipschitz upper bound: product of max-row-sum norms of the state
// columns of each layer's weights.
double lipschitz_bound(const PolicyNet& net, const double* theta);

}  // namespace cav
