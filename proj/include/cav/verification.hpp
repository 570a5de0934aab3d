#pragma once

#include "cav/game_model.hpp"
#include "cav/policy.hpp"
#include "cav/trainer.hpp"

#include <cstdint>
#include <vector>

namespace cav {

// Empirical check of the potential-difference inequality: random unilateral
// parameter deviations, |dJ_i - dPhi| against the analytic alpha bound.
struct DeviationReport {
  int trials = 0;
  double max_gap = 0.0;
  double bound = 0.0;
  bool within_bound = true;
};

DeviationReport check_potential_inequality(const GameSpec& spec,
                                           const PolicyNet& net,
                                           const PolicyParams& theta,
                                           int trials, std::uint64_t seed,
                                           int steps = 50,
                                           double perturbation = 0.5);

// Separable-weight identity: dPhi~ = (tau_i/gamma_i) dJ_i, and sign
// agreement between the rescaled-potential descent direction and the
// deviating player's own improvement.
struct RescaleReport {
  int trials = 0;
  double max_rel_gap = 0.0;
  int sign_checked = 0;
  int sign_agreements = 0;
};

RescaleReport check_rescaled_identity(const GameSpec& spec,
                                      const PolicyNet& net,
                                      const PolicyParams& theta, int trials,
                                      std::uint64_t seed, int steps = 50,
                                      double perturbation = 0.5);

// Best-response improvement for one player, evaluated on held-out noise with
// common random numbers. A lower bound on true exploitability: the retrained
// deviator need not be globally optimal.
double exploitability(const GameSpec& spec, const PolicyNet& net,
                      const PolicyParams& theta, int player,
                      const TrainConfig& br_cfg);

struct NECertificate {
  Vec incumbent_cost;   // J_i(theta)
  Vec improvement;      // clipped at zero
  double alpha = 0.0;   // analytic bound for the spec
  double eps_tol = 0.05;  // relative improvement threshold
  bool pass = false;
};

NECertificate certify(const GameSpec& spec, const PolicyNet& net,
                      const PolicyParams& theta, const TrainConfig& br_cfg,
                      double eps_tol = 0.05);

}  // namespace cav
