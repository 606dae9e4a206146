#include "treereg/node_regressor.hpp"

namespace treereg {

double node_estimate(const NodeRegressor& reg, const Vector& x_ext) {
  require_dimension(x_ext, reg.v.size(), "node regressor input");
  return reg.v.dot(x_ext);
}

void update_regressor(NodeRegressor& reg, const Vector& x_ext, double error, double step, double alpha) {
  require_dimension(x_ext, reg.v.size(), "node regressor input");
  const double gain = step * error * alpha;
  if (gain == 0.0) return;
  reg.v += gain * x_ext;
}

}  // namespace treereg
