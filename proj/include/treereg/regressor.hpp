#pragma once

// Uniform predict-then-learn interface over every learner kind, plus the
// factory that builds learners from experiment-config JSON.
//
// The desired value reaches a learner only through learn(), and learn() is
// rejected unless a prediction for the same step is pending.

#include <memory>
#include <stdexcept>
#include <string>

#include "treereg/common.hpp"
#include "treereg/json_io.hpp"

namespace treereg {

/// Bad or incomplete learner/experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SequentialRegressor {
 public:
  virtual ~SequentialRegressor() = default;

  double predict(const Vector& x_ext);
  /// Consumes the pending prediction; returns the error d - y_hat.
  double learn(double desired);
  bool pending() const { return pending_; }

  virtual std::string kind() const = 0;
  virtual WorkCounters last_work() const { return {}; }
  virtual Json snapshot() const = 0;

 protected:
  virtual double do_predict(const Vector& x_ext) = 0;
  virtual void do_learn(const Vector& x_ext, double desired) = 0;

 private:
  Vector x_;
  double y_hat_ = 0.0;
  bool pending_ = false;
};

/// Builds a learner from {"kind": dft|dat|direct|lf|vf|gkr, ...}. Every
/// hyperparameter the kind needs must be present. Throws ConfigError.
std::unique_ptr<SequentialRegressor> make_regressor(const Json& spec, int input_dim);

/// Rebuilds a learner from its snapshot(); dispatches on "kind".
std::unique_ptr<SequentialRegressor> restore_regressor(const Json& snapshot);

}  // namespace treereg
