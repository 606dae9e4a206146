#include "treereg/dat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treereg {

double DatConfig::effective_cap() const {
  if (!cap_enabled) return INFINITY;
  return step_cap ? *step_cap : 10.0 * s_plus * (1.0 - s_plus);
}

double DatConfig::boundary_rate(std::uint64_t t) const {
  if (boundary_step) return boundary_step->at(t);
  return step.at(t) / (s_plus * (1.0 - s_plus));
}

DatLearner::DatLearner(DatConfig config) : config_(std::move(config)), shape_(config_.depth), rho_(config_.depth) {
  if (config_.input_dim < 1) throw std::invalid_argument("DatLearner: input_dim must be >= 1");
  if (!(config_.s_plus >= 0.0 && config_.s_plus < 0.5)) throw std::invalid_argument("DatLearner: s_plus must lie in [0, 0.5)");
  if (config_.s_plus == 0.0 && !config_.boundary_step) {
    throw std::invalid_argument("DatLearner: s_plus = 0 needs an explicit boundary step");
  }
  if (config_.directions.empty()) config_.directions = initial_directions(config_.depth, config_.input_dim);
  if (config_.directions.size() != shape_.internal_count()) {
    throw std::invalid_argument("DatLearner: expected one direction per internal node");
  }
  const Eigen::Index ext = config_.input_dim + 1;
  nodes_.resize(shape_.node_count());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    nodes_[i].reg = NodeRegressor::zeros(ext);
    if (!shape_.is_leaf_index(i)) {
      require_dimension(config_.directions[i], ext, "DatLearner direction");
      nodes_[i].sep = Separator::soft(config_.directions[i], config_.s_plus);
    }
  }
}

DatPrediction DatLearner::predict(const Vector& x_ext) const {
  require_dimension(x_ext, config_.input_dim + 1, "DatLearner input");
  const std::size_t n = nodes_.size();
  DatPrediction out;
  out.separator.assign(n, 0.0);
  out.slope.assign(n, 0.0);
  out.alpha.assign(n, 0.0);
  out.d_hat.assign(n, 0.0);
  out.h.assign(n, 0.0);
  out.kappa.assign(n, 0.0);

  for (std::size_t i = 0; i < shape_.internal_count(); ++i) {
    const Separator& sep = *nodes_[i].sep;
    out.separator[i] = sep.evaluate(x_ext);
    out.slope[i] = sep.slope(x_ext, config_.gradient);
  }
  // Parents precede children in index order.
  out.alpha[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t parent = (i - 1) / 2;
    out.alpha[i] = out.alpha[parent] * branch_factor(out.separator[parent], static_cast<int>((i - 1) % 2));
  }

  const std::vector<double> weights = node_weights();
  for (std::size_t i = 0; i < n; ++i) {
    if (!active(i)) continue;
    out.d_hat[i] = node_estimate(nodes_[i].reg, x_ext);
    ++out.work.regressor_evaluations;
    out.h[i] = scaled_estimate(out.d_hat[i], out.alpha[i]);
    out.kappa[i] = rho_.kappa(i, weights, &out.work.kappa_accumulations);
    out.y_hat += out.kappa[i] * out.h[i];
  }
  return out;
}

void DatLearner::update_weights(const Vector& x_ext, double error, const DatPrediction& prediction) {
  const std::uint64_t t = steps_ + 1;
  const double mu = config_.step.at(t);
  const double mu_v = config_.regressor_step ? config_.regressor_step->at(t) : mu;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!active(i)) continue;
    const double coefficient = config_.regressor_update == RegressorUpdate::plain
                                   ? prediction.alpha[i]
                                   : prediction.kappa[i] * prediction.alpha[i];
    update_regressor(nodes_[i].reg, x_ext, error, mu_v, coefficient);
    nodes_[i].w += mu * error * prediction.h[i];
  }
}

std::vector<double> DatLearner::separator_sensitivities(const DatPrediction& prediction) const {
  const std::size_t n = nodes_.size();
  // below[q] = sum over the subtree of q of kappa * (alpha / alpha_q) * d_hat.
  std::vector<double> below(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    below[k] = prediction.kappa[k] * prediction.d_hat[k];
    if (!shape_.is_leaf_index(k)) {
      const double s = prediction.separator[k];
      below[k] += s * below[2 * k + 1] + (1.0 - s) * below[2 * k + 2];
    }
  }
  std::vector<double> sigma(n, 0.0);
  for (std::size_t k = 0; k < shape_.internal_count(); ++k) {
    sigma[k] = prediction.alpha[k] * (below[2 * k + 1] - below[2 * k + 2]);
  }
  return sigma;
}

std::vector<Vector> DatLearner::boundary_loss_gradients(const Vector& x_ext, double error,
                                                        const DatPrediction& prediction) const {
  const std::vector<double> sigma = separator_sensitivities(prediction);
  std::vector<Vector> out;
  out.reserve(shape_.internal_count());
  for (std::size_t k = 0; k < shape_.internal_count(); ++k) {
    out.push_back(2.0 * error * sigma[k] * prediction.slope[k] * x_ext);
  }
  return out;
}

void DatLearner::update_boundaries(const Vector& x_ext, double error, const DatPrediction& prediction) {
  if (error == 0.0) return;
  const double eta = config_.boundary_rate(steps_ + 1);
  const double cap = config_.effective_cap();
  const std::vector<double> sigma = separator_sensitivities(prediction);
  for (std::size_t k = 0; k < shape_.internal_count(); ++k) {
    const double factor = std::clamp(sigma[k] * prediction.slope[k], -cap, cap);
    nodes_[k].sep->theta -= (eta * error * factor) * x_ext;
  }
}

void DatLearner::update(const Vector& x_ext, double desired, const DatPrediction& prediction) {
  const double e = desired - prediction.y_hat;
  update_weights(x_ext, e, prediction);
  update_boundaries(x_ext, e, prediction);
  last_work_ = prediction.work;
  ++steps_;
}

StepOutcome DatLearner::step(const Vector& x_ext, double desired) {
  const DatPrediction prediction = predict(x_ext);
  update(x_ext, desired, prediction);
  return {prediction.y_hat, desired - prediction.y_hat};
}

void DatLearner::set_regressor(NodeLabel p, Vector v) {
  require_dimension(v, config_.input_dim + 1, "DatLearner regressor");
  nodes_.at(p.index()).reg.v = std::move(v);
}

void DatLearner::set_direction(NodeLabel p, Vector theta) {
  NodeState& node = nodes_.at(p.index());
  if (!node.sep) throw std::invalid_argument("DatLearner: leaves carry no separator");
  require_dimension(theta, config_.input_dim + 1, "DatLearner direction");
  node.sep->theta = std::move(theta);
}

std::vector<double> DatLearner::node_weights() const {
  std::vector<double> w(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) w[i] = nodes_[i].w;
  return w;
}

Json DatLearner::snapshot() const {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Json n{{"label", NodeLabel::from_index(i).to_string()}, {"w", nodes_[i].w}, {"v", vector_to_json(nodes_[i].reg.v)}};
    if (nodes_[i].sep) n["theta"] = vector_to_json(nodes_[i].sep->theta);
    nodes.push_back(std::move(n));
  }
  Json out{{"kind", "dat"},
           {"depth", config_.depth},
           {"input_dim", config_.input_dim},
           {"s_plus", config_.s_plus},
           {"t", steps_},
           {"step", schedule_to_json(config_.step)},
           {"cap_enabled", config_.cap_enabled},
           {"gradient", to_string(config_.gradient)},
           {"regressor_update", to_string(config_.regressor_update)},
           {"scope", config_.scope == DatScope::all_nodes ? "all_nodes" : "leaves_only"},
           {"nodes", std::move(nodes)}};
  if (config_.regressor_step) out["regressor_step"] = schedule_to_json(*config_.regressor_step);
  if (config_.boundary_step) out["boundary_step"] = schedule_to_json(*config_.boundary_step);
  if (config_.step_cap) out["step_cap"] = *config_.step_cap;
  return out;
}

DatLearner DatLearner::restore(const Json& snapshot) {
  if (snapshot.value("kind", "dat") != "dat") throw std::invalid_argument("snapshot is not a DAT learner");
  DatConfig cfg;
  cfg.depth = snapshot.at("depth").get<int>();
  cfg.input_dim = snapshot.at("input_dim").get<int>();
  cfg.s_plus = snapshot.at("s_plus").get<double>();
  cfg.step = schedule_from_json(snapshot.at("step"));
  if (snapshot.contains("regressor_step")) cfg.regressor_step = schedule_from_json(snapshot.at("regressor_step"));
  if (snapshot.contains("boundary_step")) cfg.boundary_step = schedule_from_json(snapshot.at("boundary_step"));
  cfg.cap_enabled = snapshot.value("cap_enabled", true);
  if (snapshot.contains("step_cap")) cfg.step_cap = snapshot.at("step_cap").get<double>();
  cfg.gradient = gradient_form_from_string(snapshot.value("gradient", "exact"));
  cfg.regressor_update = regressor_update_from_string(snapshot.value("regressor_update", "plain"));
  const std::string scope = snapshot.value("scope", "all_nodes");
  if (scope != "all_nodes" && scope != "leaves_only") throw std::invalid_argument("unknown DAT scope: " + scope);
  cfg.scope = scope == "all_nodes" ? DatScope::all_nodes : DatScope::leaves_only;

  const TreeShape shape(cfg.depth);
  const Json& nodes = snapshot.at("nodes");
  if (nodes.size() != shape.node_count()) throw std::invalid_argument("DAT snapshot: node count mismatch");
  cfg.directions.resize(shape.internal_count());
  for (const Json& n : nodes) {
    const NodeLabel p = NodeLabel::parse(n.at("label").get<std::string>());
    if (!shape.is_leaf(p)) cfg.directions.at(p.index()) = vector_from_json(n.at("theta"));
  }
  DatLearner learner(std::move(cfg));
  for (const Json& n : nodes) {
    const NodeLabel p = NodeLabel::parse(n.at("label").get<std::string>());
    learner.set_weight(p, n.at("w").get<double>());
    learner.set_regressor(p, vector_from_json(n.at("v")));
  }
  learner.steps_ = snapshot.at("t").get<std::uint64_t>();
  return learner;
}

}  // namespace treereg
