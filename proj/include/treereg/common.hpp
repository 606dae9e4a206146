#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace treereg {

/// Real vectors (regressors, direction vectors, weights).
using Vector = Eigen::VectorXd;

/// Step size as a function of the 1-based step index t.
///
/// `constant`: mu. `inverse_time`: 2 / (lambda * (t + offset)), the
/// strongly-convex schedule; offset = 0 gives the textbook 2/(lambda t).
struct StepSchedule {
  enum class Kind { constant, inverse_time };

  Kind kind = Kind::constant;
  double mu = 0.0;
  double lambda = 1.0;
  double offset = 0.0;

  static StepSchedule constant(double mu) { return {Kind::constant, mu, 1.0, 0.0}; }
  static StepSchedule inverse_time(double lambda, double offset = 0.0) {
    if (!(lambda > 0.0)) throw std::invalid_argument("inverse-time schedule needs lambda > 0");
    return {Kind::inverse_time, 0.0, lambda, offset};
  }

  double at(std::uint64_t t) const {
    if (kind == Kind::constant) return mu;
    return 2.0 / (lambda * (static_cast<double>(t) + offset));
  }
};

/// Per-step operation counts used to check the complexity claims.
struct WorkCounters {
  std::size_t regressor_evaluations = 0;
  std::size_t kappa_accumulations = 0;

  WorkCounters& operator+=(const WorkCounters& o) {
    regressor_evaluations += o.regressor_evaluations;
    kappa_accumulations += o.kappa_accumulations;
    return *this;
  }
};

inline void require_dimension(const Vector& v, Eigen::Index expected, const char* what) {
  if (v.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(v.size()) + ", expected " +
                                std::to_string(expected));
  }
}

}  // namespace treereg
