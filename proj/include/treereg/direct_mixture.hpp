#pragma once

// Direct mixture over every partition of the depth-d tree.
//
// Keeps one weight per partition (beta_d of them) and forms each partition's
// estimate explicitly as the sum of its leaves' scaled node estimates. This
// costs O(beta_d) per step and exists only as ground truth for the collapsed
// DFT/DAT learners; node regressors and separators are laid out the same way
// so both can be driven in lockstep from identical states.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "treereg/combinatorics.hpp"
#include "treereg/common.hpp"
#include "treereg/node_regressor.hpp"
#include "treereg/separator.hpp"

namespace treereg {

/// Largest depth the direct learner accepts (beta_4 = 677 partitions).
inline constexpr int kMaxDirectDepth = 4;

/// sum_{p in M_k} h_p, with `h` indexed by NodeLabel::index().
double model_estimate(const Partition& partition, std::span<const double> h);

/// w^(k) = sum_{p in M_k} w_p for every partition.
Vector model_weights_from_nodes(const std::vector<Partition>& partitions, std::span<const double> node_weights);

struct DirectConfig {
  int depth = 2;
  int input_dim = 2;
  SeparatorMode mode = SeparatorMode::hard;
  double s_plus = 0.01;
  StepSchedule step = StepSchedule::constant(0.005);
  std::optional<StepSchedule> regressor_step;
  std::optional<StepSchedule> boundary_step;
  bool cap_enabled = true;
  std::optional<double> step_cap;
  GradientForm gradient = GradientForm::exact;
  RegressorUpdate regressor_update = RegressorUpdate::plain;
  std::vector<Vector> directions;
};

struct DirectPrediction {
  double y_hat = 0.0;
  Vector model_estimates;
  std::vector<double> separator;
  std::vector<double> slope;
  std::vector<double> alpha;
  std::vector<double> h;
};

class DirectLearner {
 public:
  explicit DirectLearner(DirectConfig config);

  const DirectConfig& config() const { return config_; }
  const std::vector<Partition>& partitions() const { return partitions_; }
  std::size_t model_count() const { return partitions_.size(); }
  std::uint64_t steps() const { return steps_; }
  void set_steps(std::uint64_t t) { steps_ = t; }

  DirectPrediction predict(const Vector& x_ext) const;
  void update(const Vector& x_ext, double desired, const DirectPrediction& prediction);
  double step(const Vector& x_ext, double desired);

  const Vector& model_weights() const { return weights_; }
  void set_model_weights(Vector w);
  /// Sets w^(k) = sum_{p in M_k} node_weights[p].
  void set_model_weights_from_nodes(std::span<const double> node_weights);

  const NodeRegressor& regressor(NodeLabel p) const { return regressors_.at(p.index()); }
  void set_regressor(NodeLabel p, Vector v);
  const Vector& direction(NodeLabel p) const { return separators_.at(p.index()).theta; }
  void set_direction(NodeLabel p, Vector theta);

 private:
  DirectConfig config_;
  TreeShape shape_;
  std::vector<Partition> partitions_;
  Vector weights_;
  std::vector<NodeRegressor> regressors_;
  std::vector<Separator> separators_;
  std::uint64_t steps_ = 0;
};

/// Least-squares comparator argmin_w sum_t (d_t - w^T f_t)^2 over a stored
/// history, via the normal equations. Falls back to ridge (epsilon * I) when
/// the history is shorter than the feature dimension or the normal matrix is
/// rank deficient.
Vector batch_best_weights(const std::vector<Vector>& features, std::span<const double> desired,
                          double ridge_epsilon = 1e-8);

/// sum_t (d_t - w^T f_t)^2 over the first `count` entries (all when 0).
double cumulative_loss(const std::vector<Vector>& features, std::span<const double> desired, const Vector& w,
                       std::size_t count = 0);

}  // namespace treereg
