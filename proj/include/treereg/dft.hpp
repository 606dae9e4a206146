#pragma once

// Decision Fixed Tree regressor.
//
// Hard, frozen separators route every input to one leaf p'. Each node p keeps
// an affine regressor v_p and a scalar weight w_p; the weight of a partition
// is the sum of its leaves' node weights. The prediction
//
//   y = sum_{nu in Pre(p')} kappa_nu * d_hat_nu,   kappa_nu = sum_q rho(nu, q) w_q
//
// equals the linear mixture over all beta_d partitions of the tree, at
// O(d 2^d) cost per step. Only the d + 1 path nodes are updated.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "treereg/combinatorics.hpp"
#include "treereg/common.hpp"
#include "treereg/json_io.hpp"
#include "treereg/node_regressor.hpp"

namespace treereg {

struct DftConfig {
  int depth = 2;
  int input_dim = 2;
  StepSchedule step = StepSchedule::constant(0.005);
  /// Step for the node regressors; the weight step is used when unset.
  std::optional<StepSchedule> regressor_step;
  RegressorUpdate regressor_update = RegressorUpdate::plain;
  /// Direction vectors (length input_dim + 1) of the internal nodes in index
  /// order; initial_directions() when empty.
  std::vector<Vector> boundaries;
};

struct DftPrediction {
  double y_hat = 0.0;
  NodeLabel leaf;
  std::vector<NodeLabel> path;
  std::vector<double> path_estimates;
  std::vector<double> path_kappas;
  WorkCounters work;
};

struct StepOutcome {
  double y_hat;
  double error;
};

class DftLearner {
 public:
  explicit DftLearner(DftConfig config);

  const DftConfig& config() const { return config_; }
  const TreeShape& shape() const { return shape_; }
  std::uint64_t steps() const { return steps_; }

  NodeLabel locate_leaf(const Vector& x_ext) const;
  DftPrediction predict(const Vector& x_ext) const;
  /// Applies one update with the prediction made for the same input.
  void update(const Vector& x_ext, double desired, const DftPrediction& prediction);
  StepOutcome step(const Vector& x_ext, double desired);

  std::span<const NodeState> nodes() const { return nodes_; }
  const NodeState& node(NodeLabel p) const { return nodes_.at(p.index()); }
  void set_weight(NodeLabel p, double w) { nodes_.at(p.index()).w = w; }
  void set_regressor(NodeLabel p, Vector v);
  std::vector<double> node_weights() const;
  const WorkCounters& last_work() const { return last_work_; }

  /// {kind, depth, input_dim, t, step, regressor_step, regressor_update,
  ///  nodes: [{label, w, v[], theta[]?}]}
  Json snapshot() const;
  static DftLearner restore(const Json& snapshot);

 private:
  DftConfig config_;
  TreeShape shape_;
  RhoTable rho_;
  std::vector<NodeState> nodes_;
  std::uint64_t steps_ = 0;
  WorkCounters last_work_;
};

}  // namespace treereg
