#include "cav/verification.hpp"

#include "cav/rng.hpp"
#include "cav/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cav {

namespace {

struct DeviationSampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> gauss{0.0, 1.0};

  explicit DeviationSampler(std::uint64_t seed)
      : rng(make_engine(seed, 0xdef1)) {}

  PolicyParams perturb(const PolicyParams& theta, int player, double scale) {
    PolicyParams out = theta;
    const int off = theta.player_offset(player);
    const int len = theta.player_size(player);
    for (int k = 0; k < len; ++k) out.flat(off + k) += scale * gauss(rng);
    return out;
  }

  int pick_player(int players) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(players));
  }
};

}  // namespace

DeviationReport check_potential_inequality(const GameSpec& spec,
                                           const PolicyNet& net,
                                           const PolicyParams& theta,
                                           int trials, std::uint64_t seed,
                                           int steps, double perturbation) {
  spec.validate();
  const TimeGrid grid = TimeGrid::uniform(spec.horizon, steps);
  const NoiseBatch noise =
      sample_noise(spec, grid, effective_samples(spec, 1), seed);
  const ObjectiveWeights phi_w = potential_objective(spec);

  const double phi_base = evaluate_objective(spec, net, theta, grid, phi_w, noise);
  Vec j_base(spec.num_players);
  for (int i = 0; i < spec.num_players; ++i)
    j_base(i) = evaluate_objective(spec, net, theta, grid,
                                   player_objective(spec, i), noise);

  DeviationReport rep;
  rep.trials = trials;
  rep.bound = alpha_bound(spec);
  DeviationSampler sampler(seed);
  for (int t = 0; t < trials; ++t) {
    const int i = sampler.pick_player(spec.num_players);
    const PolicyParams probe = sampler.perturb(theta, i, perturbation);
    const double d_phi =
        evaluate_objective(spec, net, probe, grid, phi_w, noise) - phi_base;
    const double d_j = evaluate_objective(spec, net, probe, grid,
                                          player_objective(spec, i), noise) -
                       j_base(i);
    rep.max_gap = std::max(rep.max_gap, std::abs(d_j - d_phi));
  }
  rep.within_bound = rep.max_gap <= rep.bound + 1e-12;
  return rep;
}

RescaleReport check_rescaled_identity(const GameSpec& spec,
                                      const PolicyNet& net,
                                      const PolicyParams& theta, int trials,
                                      std::uint64_t seed, int steps,
                                      double perturbation) {
  spec.validate();
  if (!spec.weights.has_separable_tags())
    throw std::invalid_argument("rescaled identity needs separable weights");
  const TimeGrid grid = TimeGrid::uniform(spec.horizon, steps);
  const NoiseBatch noise =
      sample_noise(spec, grid, effective_samples(spec, 1), seed);
  const ObjectiveWeights phi_w = rescaled_objective(spec);

  const double phi_base = evaluate_objective(spec, net, theta, grid, phi_w, noise);
  Vec j_base(spec.num_players);
  for (int i = 0; i < spec.num_players; ++i)
    j_base(i) = evaluate_objective(spec, net, theta, grid,
                                   player_objective(spec, i), noise);

  RescaleReport rep;
  rep.trials = trials;
  DeviationSampler sampler(seed);
  for (int t = 0; t < trials; ++t) {
    const int i = sampler.pick_player(spec.num_players);
    const PolicyParams probe = sampler.perturb(theta, i, perturbation);
    const double d_phi =
        evaluate_objective(spec, net, probe, grid, phi_w, noise) - phi_base;
    const double d_j = evaluate_objective(spec, net, probe, grid,
                                          player_objective(spec, i), noise) -
                       j_base(i);
    const double ratio = (*spec.weights.tau)(i) / (*spec.weights.gamma)(i);
    const double scaled = ratio * d_j;
    const double denom = std::max({std::abs(d_phi), std::abs(scaled), 1e-12});
    rep.max_rel_gap = std::max(rep.max_rel_gap, std::abs(d_phi - scaled) / denom);
    if (std::abs(d_j) > 1e-10) {
      ++rep.sign_checked;
      if ((d_phi > 0.0) == (d_j > 0.0)) ++rep.sign_agreements;
    }
  }
  return rep;
}

double exploitability(const GameSpec& spec, const PolicyNet& net,
                      const PolicyParams& theta, int player,
                      const TrainConfig& br_cfg) {
  spec.validate();
  const TimeGrid grid = TimeGrid::uniform(spec.horizon, br_cfg.steps);
  const int m_holdout =
      spec.dynamics.deterministic() ? 1 : 10 * br_cfg.samples;
  const NoiseBatch holdout =
      sample_noise(spec, grid, m_holdout, stream_seed(br_cfg.seed, 0x0e1d));
  const ObjectiveWeights j_w = player_objective(spec, player);

  const double incumbent_cost =
      evaluate_objective(spec, net, theta, grid, j_w, holdout);
  TrainReport br = train_best_response(spec, net, theta, player, br_cfg);
  if (br.stop_reason == "diverged")
    throw std::runtime_error("best-response training diverged for player " +
                             std::to_string(player));
  const double br_cost =
      evaluate_objective(spec, net, br.final_params, grid, j_w, holdout);
  return std::max(0.0, incumbent_cost - br_cost);
}

NECertificate certify(const GameSpec& spec, const PolicyNet& net,
                      const PolicyParams& theta, const TrainConfig& br_cfg,
                      double eps_tol) {
  NECertificate cert;
  cert.alpha = alpha_bound(spec);
  cert.eps_tol = eps_tol;
  const int n = spec.num_players;
  cert.incumbent_cost = Vec(n);
  cert.improvement = Vec(n);

  const TimeGrid grid = TimeGrid::uniform(spec.horizon, br_cfg.steps);
  const int m_holdout = spec.dynamics.deterministic() ? 1 : 10 * br_cfg.samples;
  const NoiseBatch holdout =
      sample_noise(spec, grid, m_holdout, stream_seed(br_cfg.seed, 0x0e1d));
  for (int i = 0; i < n; ++i) {
    cert.incumbent_cost(i) = evaluate_objective(
        spec, net, theta, grid, player_objective(spec, i), holdout);
    cert.improvement(i) = exploitability(spec, net, theta, i, br_cfg);
  }
  cert.pass = true;
  for (int i = 0; i < n; ++i) {
    const double rel_floor = eps_tol * std::abs(cert.incumbent_cost(i));
    if (cert.improvement(i) > rel_floor) cert.pass = false;
  }
  return cert;
}

}  // namespace cav
