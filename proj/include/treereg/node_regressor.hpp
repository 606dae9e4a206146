#pragma once

#include <optional>

#include "treereg/common.hpp"
#include "treereg/separator.hpp"

namespace treereg {

/// Affine regressor of one region: d_hat = v^T [x; 1].
struct NodeRegressor {
  Vector v;

  static NodeRegressor zeros(Eigen::Index extended_dim) { return {Vector::Zero(extended_dim)}; }
};

/// Learnable state of one tree node. Leaves carry no separator.
struct NodeState {
  double w = 0.0;
  NodeRegressor reg;
  std::optional<Separator> sep;
};

double node_estimate(const NodeRegressor& reg, const Vector& x_ext);

/// h_p = alpha_p * d_hat_p.
inline double scaled_estimate(double d_hat, double alpha) { return alpha * d_hat; }

/// v <- v + step * e * alpha * x.
void update_regressor(NodeRegressor& reg, const Vector& x_ext, double error, double step, double alpha);

/// Which regressor step the tree learners take.
///   plain:          v_p += mu e alpha_p x
///   kappa_weighted: v_p += mu e kappa_p alpha_p x  (exact half-gradient of e^2)
enum class RegressorUpdate { plain, kappa_weighted };

}  // namespace treereg
