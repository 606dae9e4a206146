#pragma once

// Decision Adaptive Tree regressor.
//
// Every internal node carries a clamped logistic separator, so every node p
// is active with path weight alpha_p = prod of branch factors. With
// h_p = alpha_p * d_hat_p the prediction is
//
//   y = sum_{p in N_d} kappa_p h_p,   kappa_p = sum_q rho(p, q) w_q,
//
// which is exactly the linear mixture over all beta_d partitions. Weights and
// regressors follow the stochastic gradient of e^2; separator directions move
// along d y / d s_p, computed in O(2^d) by a bottom-up pass (no division by
// s). Cost per step is O(m 4^d), dominated by the kappa products.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "treereg/combinatorics.hpp"
#include "treereg/common.hpp"
#include "treereg/dft.hpp"
#include "treereg/json_io.hpp"
#include "treereg/node_regressor.hpp"

namespace treereg {

/// Nodes whose regressors contribute to the estimate. `leaves_only` keeps
/// internal regressors at zero and never updates them.
enum class DatScope { all_nodes, leaves_only };

struct DatConfig {
  int depth = 2;
  int input_dim = 2;
  double s_plus = 0.01;
  StepSchedule step = StepSchedule::constant(0.005);
  std::optional<StepSchedule> regressor_step;
  /// Boundary step. Unset: eta_t = mu_t / (s_plus (1 - s_plus)).
  std::optional<StepSchedule> boundary_step;
  /// Bound on |sigma_p * slope_p| in the boundary update. Unset with
  /// cap_enabled: 10 s_plus (1 - s_plus).
  bool cap_enabled = true;
  std::optional<double> step_cap;
  GradientForm gradient = GradientForm::exact;
  RegressorUpdate regressor_update = RegressorUpdate::plain;
  DatScope scope = DatScope::all_nodes;
  /// Initial direction vectors of the internal nodes; initial_directions()
  /// when empty.
  std::vector<Vector> directions;

  double effective_cap() const;
  double boundary_rate(std::uint64_t t) const;
};

/// Everything the update needs from the time-t state. Arrays are indexed by
/// NodeLabel::index(); `separator` and `slope` are 0 at leaves.
struct DatPrediction {
  double y_hat = 0.0;
  std::vector<double> separator;
  std::vector<double> slope;
  std::vector<double> alpha;
  std::vector<double> d_hat;
  std::vector<double> h;
  std::vector<double> kappa;
  WorkCounters work;
};

class DatLearner {
 public:
  explicit DatLearner(DatConfig config);

  const DatConfig& config() const { return config_; }
  const TreeShape& shape() const { return shape_; }
  std::uint64_t steps() const { return steps_; }

  DatPrediction predict(const Vector& x_ext) const;
  /// v_p += mu e alpha_p x and w_p += mu e h_p for every active node.
  void update_weights(const Vector& x_ext, double error, const DatPrediction& prediction);
  /// theta_p -= eta e clip(sigma_p * slope_p) x for every internal node.
  void update_boundaries(const Vector& x_ext, double error, const DatPrediction& prediction);
  /// Both updates with the prediction made for the same input; advances t.
  void update(const Vector& x_ext, double desired, const DatPrediction& prediction);
  StepOutcome step(const Vector& x_ext, double desired);

  /// sigma_p = d y / d s_p for every internal node (0 at leaves).
  std::vector<double> separator_sensitivities(const DatPrediction& prediction) const;
  /// d(e^2)/d theta_p for the internal nodes, in index order. Uses the
  /// configured gradient form; exact when GradientForm::exact.
  std::vector<Vector> boundary_loss_gradients(const Vector& x_ext, double error,
                                              const DatPrediction& prediction) const;

  std::span<const NodeState> nodes() const { return nodes_; }
  const NodeState& node(NodeLabel p) const { return nodes_.at(p.index()); }
  void set_weight(NodeLabel p, double w) { nodes_.at(p.index()).w = w; }
  void set_regressor(NodeLabel p, Vector v);
  void set_direction(NodeLabel p, Vector theta);
  std::vector<double> node_weights() const;
  const WorkCounters& last_work() const { return last_work_; }

  /// {kind, depth, input_dim, s_plus, t, step, ..., nodes: [{label, w, v[], theta[]?}]}
  Json snapshot() const;
  static DatLearner restore(const Json& snapshot);

 private:
  bool active(std::size_t index) const { return config_.scope == DatScope::all_nodes || shape_.is_leaf_index(index); }

  DatConfig config_;
  TreeShape shape_;
  RhoTable rho_;
  std::vector<NodeState> nodes_;
  std::uint64_t steps_ = 0;
  WorkCounters last_work_;
};

}  // namespace treereg
