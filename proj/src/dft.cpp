#include "treereg/dft.hpp"

#include <cmath>
#include <stdexcept>

namespace treereg {

DftLearner::DftLearner(DftConfig config)
    : config_(std::move(config)), shape_(config_.depth), rho_(config_.depth) {
  if (config_.input_dim < 1) throw std::invalid_argument("DftLearner: input_dim must be >= 1");
  if (config_.boundaries.empty()) config_.boundaries = initial_directions(config_.depth, config_.input_dim);
  if (config_.boundaries.size() != shape_.internal_count()) {
    throw std::invalid_argument("DftLearner: expected one boundary per internal node");
  }
  const Eigen::Index ext = config_.input_dim + 1;
  nodes_.resize(shape_.node_count());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    nodes_[i].reg = NodeRegressor::zeros(ext);
    if (!shape_.is_leaf_index(i)) {
      require_dimension(config_.boundaries[i], ext, "DftLearner boundary");
      nodes_[i].sep = Separator::hard(config_.boundaries[i]);
    }
  }
}

NodeLabel DftLearner::locate_leaf(const Vector& x_ext) const {
  NodeLabel p = NodeLabel::root();
  while (!shape_.is_leaf(p)) {
    const double s = nodes_[p.index()].sep->evaluate(x_ext);
    p = p.child(s == 1.0 ? 0 : 1);
  }
  return p;
}

DftPrediction DftLearner::predict(const Vector& x_ext) const {
  require_dimension(x_ext, config_.input_dim + 1, "DftLearner input");
  const std::vector<double> weights = node_weights();

  DftPrediction out;
  out.leaf = locate_leaf(x_ext);
  out.path = prefixes(out.leaf);
  out.path_estimates.reserve(out.path.size());
  out.path_kappas.reserve(out.path.size());
  for (NodeLabel nu : out.path) {
    const double d_hat = node_estimate(nodes_[nu.index()].reg, x_ext);
    const double k = rho_.kappa(nu.index(), weights, &out.work.kappa_accumulations);
    ++out.work.regressor_evaluations;
    out.path_estimates.push_back(d_hat);
    out.path_kappas.push_back(k);
    out.y_hat += k * d_hat;
  }
  return out;
}

void DftLearner::update(const Vector& x_ext, double desired, const DftPrediction& prediction) {
  const double e = desired - prediction.y_hat;
  const std::uint64_t t = steps_ + 1;
  const double mu = config_.step.at(t);
  const double mu_v = config_.regressor_step ? config_.regressor_step->at(t) : mu;
  for (std::size_t j = 0; j < prediction.path.size(); ++j) {
    NodeState& node = nodes_[prediction.path[j].index()];
    const double coefficient =
        config_.regressor_update == RegressorUpdate::plain ? 1.0 : prediction.path_kappas[j];
    update_regressor(node.reg, x_ext, e, mu_v, coefficient);
    node.w += mu * e * prediction.path_estimates[j];
  }
  last_work_ = prediction.work;
  steps_ = t;
}

StepOutcome DftLearner::step(const Vector& x_ext, double desired) {
  const DftPrediction prediction = predict(x_ext);
  update(x_ext, desired, prediction);
  return {prediction.y_hat, desired - prediction.y_hat};
}

void DftLearner::set_regressor(NodeLabel p, Vector v) {
  require_dimension(v, config_.input_dim + 1, "DftLearner regressor");
  nodes_.at(p.index()).reg.v = std::move(v);
}

std::vector<double> DftLearner::node_weights() const {
  std::vector<double> w(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) w[i] = nodes_[i].w;
  return w;
}

Json DftLearner::snapshot() const {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Json n{{"label", NodeLabel::from_index(i).to_string()}, {"w", nodes_[i].w}, {"v", vector_to_json(nodes_[i].reg.v)}};
    if (nodes_[i].sep) n["theta"] = vector_to_json(nodes_[i].sep->theta);
    nodes.push_back(std::move(n));
  }
  Json out{{"kind", "dft"},
           {"depth", config_.depth},
           {"input_dim", config_.input_dim},
           {"t", steps_},
           {"step", schedule_to_json(config_.step)},
           {"regressor_update", to_string(config_.regressor_update)},
           {"nodes", std::move(nodes)}};
  if (config_.regressor_step) out["regressor_step"] = schedule_to_json(*config_.regressor_step);
  return out;
}

DftLearner DftLearner::restore(const Json& snapshot) {
  if (snapshot.value("kind", "dft") != "dft") throw std::invalid_argument("snapshot is not a DFT learner");
  DftConfig cfg;
  cfg.depth = snapshot.at("depth").get<int>();
  cfg.input_dim = snapshot.at("input_dim").get<int>();
  cfg.step = schedule_from_json(snapshot.at("step"));
  if (snapshot.contains("regressor_step")) cfg.regressor_step = schedule_from_json(snapshot.at("regressor_step"));
  cfg.regressor_update = regressor_update_from_string(snapshot.value("regressor_update", "plain"));
  const TreeShape shape(cfg.depth);
  const Json& nodes = snapshot.at("nodes");
  if (nodes.size() != shape.node_count()) throw std::invalid_argument("DFT snapshot: node count mismatch");
  cfg.boundaries.resize(shape.internal_count());
  for (const Json& n : nodes) {
    const NodeLabel p = NodeLabel::parse(n.at("label").get<std::string>());
    if (!shape.is_leaf(p)) cfg.boundaries.at(p.index()) = vector_from_json(n.at("theta"));
  }
  DftLearner learner(std::move(cfg));
  for (const Json& n : nodes) {
    const NodeLabel p = NodeLabel::parse(n.at("label").get<std::string>());
    learner.set_weight(p, n.at("w").get<double>());
    learner.set_regressor(p, vector_from_json(n.at("v")));
  }
  learner.steps_ = snapshot.at("t").get<std::uint64_t>();
  return learner;
}

}  // namespace treereg
