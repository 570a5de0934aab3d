#include "cav/trainer.hpp"

#include "cav/rng.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace cav {

void TrainConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (learning_rate <= 0.0)
    throw std::invalid_argument("learning rate must be positive");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  if (grad_tolerance < 0.0)
    throw std::invalid_argument("tolerance must be nonnegative");
}

namespace {

struct TrainableSpan {
  int offset = 0;
  int length = 0;
};

TrainReport run_adam(const GameSpec& spec, const PolicyNet& net,
                     const TrainConfig& cfg, PolicyParams theta,
                     const ObjectiveWeights& objective,
                     const TrainableSpan& span, const CheckpointHook& hook) {
  cfg.validate();
  spec.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const TimeGrid grid = TimeGrid::uniform(spec.horizon, cfg.steps);
  const int m_eff = effective_samples(spec, cfg.samples);

  RolloutObjective obj;
  obj.spec = &spec;
  obj.net = &net;
  obj.grid = grid;
  obj.weights = objective;

  TrainReport report;
  Vec adam_m = Vec::Zero(span.length);
  Vec adam_v = Vec::Zero(span.length);
  NoiseBatch noise =
      sample_noise(spec, grid, m_eff, stream_seed(cfg.seed, 0x401e, 0));
  PolicyParams last_finite = theta;
  report.stop_reason = "iterations";

  for (int it = 0; it < cfg.iterations; ++it) {
    if (cfg.resample_noise && it > 0)
      noise = sample_noise(spec, grid, m_eff,
                           stream_seed(cfg.seed, 0x401e,
                                       static_cast<std::uint64_t>(it)));
    obj.noise = &noise;
    GradResult res = grad(theta, obj);
    if (!std::isfinite(res.value)) {
      theta = last_finite;
      report.stop_reason = "diverged";
      break;
    }
    last_finite = theta;
    const Vec g = res.gradient.segment(span.offset, span.length);
    const double gnorm = g.norm();
    report.phi_history.push_back(res.value);
    report.grad_norm_history.push_back(gnorm);

    adam_m = cfg.adam_beta1 * adam_m + (1.0 - cfg.adam_beta1) * g;
    adam_v = cfg.adam_beta2 * adam_v.array().matrix() +
             (1.0 - cfg.adam_beta2) * g.array().square().matrix();
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, it + 1);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, it + 1);
    theta.flat.segment(span.offset, span.length).array() -=
        cfg.learning_rate * (adam_m.array() / bc1) /
        ((adam_v.array() / bc2).sqrt() + cfg.adam_eps);

    if (hook && cfg.checkpoint_every > 0 && (it + 1) % cfg.checkpoint_every == 0)
      hook(it + 1, theta);
    if (cfg.grad_tolerance > 0.0 && gnorm <= cfg.grad_tolerance) {
      report.stop_reason = "tolerance";
      break;
    }
  }

  report.final_params = theta;
  const RolloutBatch eval_batch =
      simulate(spec, net, theta, grid, m_eff,
               stream_seed(cfg.seed, 0x401e, 0xe7a1));
  report.final_estimate = estimate_potential(spec, eval_batch);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

}  // namespace

TrainReport train(const GameSpec& spec, const PolicyNet& net,
                  const TrainConfig& cfg, const CheckpointHook& hook) {
  return train_from(spec, net, init_params(net, spec.num_players, cfg.seed),
                    cfg, hook);
}

TrainReport train_from(const GameSpec& spec, const PolicyNet& net,
                       const PolicyParams& start, const TrainConfig& cfg,
                       const CheckpointHook& hook) {
  TrainableSpan span{0, start.size()};
  return run_adam(spec, net, cfg, start, potential_objective(spec), span,
                  hook);
}

TrainReport train_best_response(const GameSpec& spec, const PolicyNet& net,
                                const PolicyParams& incumbent, int player,
                                const TrainConfig& cfg) {
  if (player < 0 || player >= spec.num_players)
    throw std::invalid_argument("player index out of range");
  TrainableSpan span{incumbent.player_offset(player),
                     incumbent.player_size(player)};
  return run_adam(spec, net, cfg, incumbent, player_objective(spec, player),
                  span, {});
}

}  // namespace cav
