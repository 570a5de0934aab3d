#include "cav/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace cav {

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

Vec vec_from_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index k = 0;
  for (const auto& x : j) v(k++) = x.get<double>();
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    rows.push_back(vec_to_json(m.row(r).transpose()));
  return rows;
}

Mat mat_from_json(const json& j) {
  const auto nr = static_cast<Eigen::Index>(j.size());
  if (nr == 0) return Mat();
  const auto nc = static_cast<Eigen::Index>(j.front().size());
  Mat m(nr, nc);
  Eigen::Index r = 0;
  for (const auto& row : j) {
    if (static_cast<Eigen::Index>(row.size()) != nc)
      throw std::invalid_argument("ragged matrix in config");
    m.row(r++) = vec_from_json(row).transpose();
  }
  return m;
}

}  // namespace

json to_json(const GameSpec& spec) {
  json j;
  j["players"] = spec.num_players;
  j["horizon"] = spec.horizon;
  j["dynamics"] = {
      {"model", spec.dynamics.model == DynamicsModel::VelocityControl
                    ? "velocity"
                    : "acceleration"},
      {"dim", spec.dynamics.dim},
  };
  if (spec.dynamics.noise_scale.size() > 0)
    j["dynamics"]["noise"] = vec_to_json(spec.dynamics.noise_scale);

  if (spec.weights.has_separable_tags()) {
    j["weights"] = {{"gamma", vec_to_json(*spec.weights.gamma)},
                    {"tau", vec_to_json(*spec.weights.tau)}};
  } else {
    j["weights"] = {{"lambda", mat_to_json(spec.weights.lambda)}};
  }

  if (spec.kernel.shape == Kernel::Shape::ScaledRadial) {
    j["kernel"] = {{"shape", "scaled_radial"}, {"beta", spec.kernel.beta}};
  } else {
    j["kernel"] = {{"shape", "inverse_quadratic"}, {"scale", spec.kernel.scale_c}};
  }

  json costs = json::array();
  for (const auto& pc : spec.costs.players) {
    json c = {{"action_coeff", pc.action_cost_coeff},
              {"terminal_coeff", pc.terminal_coeff},
              {"target", vec_to_json(pc.target)}};
    if (pc.obstacle) {
      c["obstacle"] = {{"amplitude", pc.obstacle->amplitude},
                       {"sharpness", pc.obstacle->sharpness},
                       {"curvature", pc.obstacle->curvature},
                       {"center", vec_to_json(pc.obstacle->center)}};
    }
    costs.push_back(c);
  }
  j["costs"] = costs;

  json init = json::array();
  for (const auto& xi : spec.initial_states) init.push_back(vec_to_json(xi));
  j["initial_states"] = init;
  return j;
}

GameSpec game_spec_from_json(const json& j) {
  GameSpec spec;
  spec.num_players = j.at("players").get<int>();
  spec.horizon = j.at("horizon").get<double>();

  const json& dyn = j.at("dynamics");
  const std::string model = dyn.at("model").get<std::string>();
  if (model == "velocity") {
    spec.dynamics.model = DynamicsModel::VelocityControl;
  } else if (model == "acceleration") {
    spec.dynamics.model = DynamicsModel::AccelerationControl;
  } else {
    throw std::invalid_argument("unknown dynamics model: " + model);
  }
  spec.dynamics.dim = dyn.at("dim").get<int>();
  if (dyn.contains("noise")) spec.dynamics.noise_scale = vec_from_json(dyn["noise"]);

  const json& w = j.at("weights");
  if (w.contains("gamma")) {
    spec.weights = InteractionWeights::separable(vec_from_json(w.at("gamma")),
                                                 vec_from_json(w.at("tau")));
  } else {
    spec.weights.lambda = mat_from_json(w.at("lambda"));
    spec.weights.lambda.diagonal().setZero();
  }

  const json& k = j.at("kernel");
  const std::string shape = k.at("shape").get<std::string>();
  if (shape == "scaled_radial") {
    spec.kernel = Kernel::scaled_radial(k.at("beta").get<double>(),
                                        spec.num_players, spec.dynamics.dim);
  } else if (shape == "inverse_quadratic") {
    spec.kernel = Kernel::inverse_quadratic(k.at("scale").get<double>());
  } else {
    throw std::invalid_argument("unknown kernel shape: " + shape);
  }

  for (const auto& c : j.at("costs")) {
    PlayerCost pc;
    pc.action_cost_coeff = c.at("action_coeff").get<double>();
    pc.terminal_coeff = c.at("terminal_coeff").get<double>();
    pc.target = vec_from_json(c.at("target"));
    if (c.contains("obstacle")) {
      ObstacleCost o;
      o.amplitude = c["obstacle"].at("amplitude").get<double>();
      o.sharpness = c["obstacle"].at("sharpness").get<double>();
      o.curvature = c["obstacle"].at("curvature").get<double>();
      o.center = vec_from_json(c["obstacle"].at("center"));
      pc.obstacle = o;
    }
    spec.costs.players.push_back(pc);
  }

  for (const auto& xi : j.at("initial_states"))
    spec.initial_states.push_back(vec_from_json(xi));

  spec.validate();
  return spec;
}

json to_json(const TrainConfig& cfg) {
  return {{"iterations", cfg.iterations},
          {"learning_rate", cfg.learning_rate},
          {"adam_beta1", cfg.adam_beta1},
          {"adam_beta2", cfg.adam_beta2},
          {"adam_eps", cfg.adam_eps},
          {"samples", cfg.samples},
          {"steps", cfg.steps},
          {"seed", cfg.seed},
          {"resample_noise", cfg.resample_noise},
          {"checkpoint_every", cfg.checkpoint_every},
          {"grad_tolerance", cfg.grad_tolerance}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.adam_beta1 = j.value("adam_beta1", cfg.adam_beta1);
  cfg.adam_beta2 = j.value("adam_beta2", cfg.adam_beta2);
  cfg.adam_eps = j.value("adam_eps", cfg.adam_eps);
  cfg.samples = j.value("samples", cfg.samples);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.resample_noise = j.value("resample_noise", cfg.resample_noise);
  cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
  cfg.grad_tolerance = j.value("grad_tolerance", cfg.grad_tolerance);
  cfg.validate();
  return cfg;
}

json to_json(const PolicyArch& arch) { return {{"hidden", arch.hidden}}; }

PolicyArch policy_arch_from_json(const json& j) {
  PolicyArch arch;
  arch.hidden = j.at("hidden").get<std::vector<int>>();
  return arch;
}

json to_json(const Checkpoint& c) {
  json j;
  j["format_version"] = 1;
  j["game"] = to_json(c.spec);
  j["arch"] = to_json(c.arch);
  j["offsets"] = c.params.offsets;
  j["theta"] = vec_to_json(c.params.flat);
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  if (j.at("format_version").get<int>() != 1)
    throw std::invalid_argument("unsupported checkpoint version");
  Checkpoint c;
  c.spec = game_spec_from_json(j.at("game"));
  c.arch = policy_arch_from_json(j.at("arch"));
  c.params.offsets = j.at("offsets").get<std::vector<int>>();
  c.params.flat = vec_from_json(j.at("theta"));
  const PolicyNet net(c.spec.dynamics.state_dim(), c.spec.dynamics.action_dim(),
                      c.arch);
  if (c.params.players() != c.spec.num_players ||
      c.params.size() != c.spec.num_players * net.params_per_player)
    throw std::invalid_argument("checkpoint parameter layout mismatch");
  return c;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return json::parse(is);
}

json report_to_json(const TrainReport& report) {
  json j;
  j["iterations_completed"] = report.phi_history.size();
  j["phi_history"] = report.phi_history;
  j["grad_norm_history"] = report.grad_norm_history;
  j["wall_seconds"] = report.wall_seconds;
  j["stop_reason"] = report.stop_reason;
  j["final"] = {{"phi", report.final_estimate.phi},
                {"per_player_cost", vec_to_json(report.final_estimate.per_player_cost)},
                {"min_pair_distance", report.final_estimate.min_pair_distance},
                {"max_pair_distance", report.final_estimate.max_pair_distance},
                {"obstacle_occupancy", report.final_estimate.obstacle_occupancy}};
  return j;
}

json certificate_to_json(const NECertificate& cert) {
  return {{"incumbent_cost", vec_to_json(cert.incumbent_cost)},
          {"improvement", vec_to_json(cert.improvement)},
          {"alpha_bound", cert.alpha},
          {"eps_tol", cert.eps_tol},
          {"pass", cert.pass}};
}

void write_phi_history_csv(const TrainReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "iteration,phi,grad_norm\n";
  char buf[64];
  for (std::size_t it = 0; it < report.phi_history.size(); ++it) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g", it,
                  report.phi_history[it], report.grad_norm_history[it]);
    os << buf << "\n";
  }
}

void write_trajectories_csv(const RolloutBatch& batch, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  export_csv(batch, os);
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

struct Frame {
  double xmin, xmax, ymin, ymax;
  double width = 640.0, height = 480.0, margin = 48.0;

  double px(double x) const {
    return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
  }
  double py(double y) const {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  }
};

void expand(double& lo, double& hi) {
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

}  // namespace

void write_trajectory_svg(const GameSpec& spec, const RolloutBatch& batch,
                          const std::vector<int>& color_group,
                          const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  const int n = batch.players();
  const int steps = batch.grid.steps();
  const bool planar = spec.dynamics.dim >= 2;
  const int m = 0;  // first sample only

  Frame fr{0, 1, 0, 1};
  if (planar) {
    fr.xmin = fr.ymin = std::numeric_limits<double>::infinity();
    fr.xmax = fr.ymax = -fr.xmin;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l <= steps; ++l) {
        fr.xmin = std::min(fr.xmin, batch.states[m][i](l, 0));
        fr.xmax = std::max(fr.xmax, batch.states[m][i](l, 0));
        fr.ymin = std::min(fr.ymin, batch.states[m][i](l, 1));
        fr.ymax = std::max(fr.ymax, batch.states[m][i](l, 1));
      }
  } else {
    fr.xmin = 0.0;
    fr.xmax = batch.grid.horizon();
    fr.ymin = std::numeric_limits<double>::infinity();
    fr.ymax = -fr.ymin;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l <= steps; ++l) {
        fr.ymin = std::min(fr.ymin, batch.states[m][i](l, 0));
        fr.ymax = std::max(fr.ymax, batch.states[m][i](l, 0));
      }
  }
  expand(fr.xmin, fr.xmax);
  expand(fr.ymin, fr.ymax);

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fr.width
     << "\" height=\"" << fr.height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<rect x=\"" << fr.margin << "\" y=\"" << fr.margin << "\" width=\""
     << fr.width - 2 * fr.margin << "\" height=\"" << fr.height - 2 * fr.margin
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // obstacle circle at radius 1/sqrt(curvature)
  if (planar) {
    for (const auto& pc : spec.costs.players) {
      if (!pc.obstacle) continue;
      const double radius = 1.0 / std::sqrt(pc.obstacle->curvature);
      double cx = 0.0, cy = 0.0;
      if (pc.obstacle->center.size() >= 2) {
        cx = pc.obstacle->center(0);
        cy = pc.obstacle->center(1);
      }
      const double rx = std::abs(fr.px(cx + radius) - fr.px(cx));
      os << "<ellipse cx=\"" << fr.px(cx) << "\" cy=\"" << fr.py(cy)
         << "\" rx=\"" << rx << "\" ry=\""
         << std::abs(fr.py(cy + radius) - fr.py(cy))
         << "\" fill=\"#ddd\" stroke=\"#555\"/>\n";
      break;  // one shared obstacle is the common case
    }
  }

  for (int i = 0; i < n; ++i) {
    const int group = color_group.empty() ? i : color_group[i];
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[group % 10]
       << "\" stroke-width=\"1.5\" points=\"";
    for (int l = 0; l <= steps; ++l) {
      double x, y;
      if (planar) {
        x = batch.states[m][i](l, 0);
        y = batch.states[m][i](l, 1);
      } else {
        x = batch.grid.nodes[l];
        y = batch.states[m][i](l, 0);
      }
      os << fr.px(x) << ',' << fr.py(y) << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace cav
