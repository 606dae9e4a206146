#include "treereg/direct_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace treereg {

double model_estimate(const Partition& partition, std::span<const double> h) {
  double sum = 0.0;
  for (NodeLabel p : partition.leaves) {
    if (p.index() >= h.size()) throw std::invalid_argument("model_estimate: missing node " + p.to_string());
    sum += h[p.index()];
  }
  return sum;
}

Vector model_weights_from_nodes(const std::vector<Partition>& partitions, std::span<const double> node_weights) {
  Vector w(static_cast<Eigen::Index>(partitions.size()));
  for (std::size_t k = 0; k < partitions.size(); ++k) {
    w[static_cast<Eigen::Index>(k)] = model_estimate(partitions[k], node_weights);
  }
  return w;
}

DirectLearner::DirectLearner(DirectConfig config)
    : config_(std::move(config)), shape_(config_.depth), partitions_(enumerate_partitions(config_.depth, kMaxDirectDepth)) {
  if (config_.input_dim < 1) throw std::invalid_argument("DirectLearner: input_dim must be >= 1");
  if (config_.directions.empty()) config_.directions = initial_directions(config_.depth, config_.input_dim);
  if (config_.directions.size() != shape_.internal_count()) {
    throw std::invalid_argument("DirectLearner: expected one direction per internal node");
  }
  if (config_.mode == SeparatorMode::soft && config_.s_plus == 0.0 && !config_.boundary_step) {
    throw std::invalid_argument("DirectLearner: s_plus = 0 needs an explicit boundary step");
  }
  const Eigen::Index ext = config_.input_dim + 1;
  weights_ = Vector::Zero(static_cast<Eigen::Index>(partitions_.size()));
  regressors_.assign(shape_.node_count(), NodeRegressor::zeros(ext));
  for (const Vector& theta : config_.directions) {
    require_dimension(theta, ext, "DirectLearner direction");
    separators_.push_back(config_.mode == SeparatorMode::hard ? Separator::hard(theta)
                                                              : Separator::soft(theta, config_.s_plus));
  }
}

DirectPrediction DirectLearner::predict(const Vector& x_ext) const {
  require_dimension(x_ext, config_.input_dim + 1, "DirectLearner input");
  const std::size_t n = shape_.node_count();
  DirectPrediction out;
  out.separator.assign(n, 0.0);
  out.slope.assign(n, 0.0);
  for (std::size_t i = 0; i < separators_.size(); ++i) {
    out.separator[i] = separators_[i].evaluate(x_ext);
    if (config_.mode == SeparatorMode::soft) out.slope[i] = separators_[i].slope(x_ext, config_.gradient);
  }
  out.alpha.resize(n);
  out.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeLabel p = NodeLabel::from_index(i);
    out.alpha[i] = path_product(p, out.separator);
    out.h[i] = scaled_estimate(node_estimate(regressors_[i], x_ext), out.alpha[i]);
  }
  out.model_estimates.resize(static_cast<Eigen::Index>(partitions_.size()));
  for (std::size_t k = 0; k < partitions_.size(); ++k) {
    out.model_estimates[static_cast<Eigen::Index>(k)] = model_estimate(partitions_[k], out.h);
  }
  out.y_hat = weights_.dot(out.model_estimates);
  return out;
}

void DirectLearner::update(const Vector& x_ext, double desired, const DirectPrediction& prediction) {
  const double e = desired - prediction.y_hat;
  const std::uint64_t t = steps_ + 1;
  const double mu = config_.step.at(t);
  const double mu_v = config_.regressor_step ? config_.regressor_step->at(t) : mu;
  const std::size_t n = shape_.node_count();

  // Node p's estimate enters y once per partition that has p as a leaf.
  std::vector<double> leaf_weight(n, 0.0);
  for (std::size_t k = 0; k < partitions_.size(); ++k) {
    for (NodeLabel p : partitions_[k].leaves) leaf_weight[p.index()] += weights_[static_cast<Eigen::Index>(k)];
  }

  if (config_.mode == SeparatorMode::soft && e != 0.0) {
    const double eta = config_.boundary_step ? config_.boundary_step->at(t)
                                             : mu / (config_.s_plus * (1.0 - config_.s_plus));
    const double cap = !config_.cap_enabled ? INFINITY
                       : config_.step_cap   ? *config_.step_cap
                                            : 10.0 * config_.s_plus * (1.0 - config_.s_plus);
    for (std::size_t i = 0; i < separators_.size(); ++i) {
      const NodeLabel p = NodeLabel::from_index(i);
      const double s = prediction.separator[i];
      // d y / d s_p: each h_q below p carries s_p (lower subtree) or 1 - s_p.
      double sigma = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        const NodeLabel node = NodeLabel::from_index(q);
        if (node.length() <= p.length() || !p.is_prefix_of(node)) continue;
        const int branch = node.letter(p.length());
        sigma += leaf_weight[q] * (branch == 0 ? prediction.h[q] / s : -prediction.h[q] / (1.0 - s));
      }
      const double factor = std::clamp(sigma * prediction.slope[i], -cap, cap);
      separators_[i].theta -= (eta * e * factor) * x_ext;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double coefficient = config_.regressor_update == RegressorUpdate::plain
                                   ? prediction.alpha[i]
                                   : leaf_weight[i] * prediction.alpha[i];
    update_regressor(regressors_[i], x_ext, e, mu_v, coefficient);
  }
  weights_ += (mu * e) * prediction.model_estimates;
  steps_ = t;
}

double DirectLearner::step(const Vector& x_ext, double desired) {
  const DirectPrediction prediction = predict(x_ext);
  update(x_ext, desired, prediction);
  return prediction.y_hat;
}

void DirectLearner::set_model_weights(Vector w) {
  require_dimension(w, weights_.size(), "DirectLearner model weights");
  weights_ = std::move(w);
}

void DirectLearner::set_model_weights_from_nodes(std::span<const double> node_weights) {
  if (node_weights.size() != shape_.node_count()) throw std::invalid_argument("DirectLearner: node weight count mismatch");
  weights_ = model_weights_from_nodes(partitions_, node_weights);
}

void DirectLearner::set_regressor(NodeLabel p, Vector v) {
  require_dimension(v, config_.input_dim + 1, "DirectLearner regressor");
  regressors_.at(p.index()).v = std::move(v);
}

void DirectLearner::set_direction(NodeLabel p, Vector theta) {
  if (p.index() >= separators_.size()) throw std::invalid_argument("DirectLearner: leaves carry no separator");
  require_dimension(theta, config_.input_dim + 1, "DirectLearner direction");
  separators_[p.index()].theta = std::move(theta);
}

Vector batch_best_weights(const std::vector<Vector>& features, std::span<const double> desired, double ridge_epsilon) {
  if (features.empty()) throw std::invalid_argument("batch_best_weights: empty history");
  if (features.size() != desired.size()) throw std::invalid_argument("batch_best_weights: length mismatch");
  const Eigen::Index dim = features.front().size();
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  for (std::size_t t = 0; t < features.size(); ++t) {
    require_dimension(features[t], dim, "batch_best_weights feature");
    normal.selfadjointView<Eigen::Lower>().rankUpdate(features[t]);
    rhs += desired[t] * features[t];
  }
  normal = normal.selfadjointView<Eigen::Lower>();

  const bool short_history = static_cast<Eigen::Index>(features.size()) < dim;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
  if (short_history || qr.rank() < dim) {
    normal.diagonal().array() += ridge_epsilon;
    return normal.llt().solve(rhs);
  }
  return qr.solve(rhs);
}

double cumulative_loss(const std::vector<Vector>& features, std::span<const double> desired, const Vector& w,
                       std::size_t count) {
  const std::size_t n = count == 0 ? features.size() : std::min(count, features.size());
  double loss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double e = desired[t] - w.dot(features[t]);
    loss += e * e;
  }
  return loss;
}

}  // namespace treereg
