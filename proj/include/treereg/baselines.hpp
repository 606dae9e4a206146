#pragma once

// Comparison regressors: linear filter (LMS), truncated Volterra filter (LMS
// over polynomial features) and a Gaussian-kernel regressor with fixed
// centers. All take the extended regressor [x; 1] and run predict-then-update.

#include <vector>

#include <Eigen/Core>

#include "treereg/common.hpp"
#include "treereg/dft.hpp"
#include "treereg/json_io.hpp"

namespace treereg {

class LinearFilter {
 public:
  LinearFilter(int input_dim, double mu);

  double predict(const Vector& x_ext) const;
  void update(const Vector& x_ext, double error);
  StepOutcome step(const Vector& x_ext, double desired);

  const Vector& weights() const { return v_; }
  void set_weights(Vector v);
  double mu() const { return mu_; }

  Json snapshot() const;
  static LinearFilter restore(const Json& snapshot);

 private:
  double mu_;
  Vector v_;
};

/// Number of monomials of total degree <= order in `input_dim` variables.
std::size_t volterra_dimension(int input_dim, int order);

/// [1, x_i, x_i x_j (i <= j), x_i x_j x_k (i <= j <= k)] up to `order`
/// (2 or 3). Throws std::invalid_argument for other orders.
Vector volterra_features(const Vector& x, int order);

class VolterraFilter {
 public:
  VolterraFilter(int input_dim, int order, double mu);

  /// Uses the first input_dim entries of x_ext.
  double predict(const Vector& x_ext) const;
  void update(const Vector& x_ext, double error);
  StepOutcome step(const Vector& x_ext, double desired);

  int order() const { return order_; }
  const Vector& weights() const { return v_; }

  Json snapshot() const;
  static VolterraFilter restore(const Json& snapshot);

 private:
  Vector features(const Vector& x_ext) const;

  int input_dim_;
  int order_;
  double mu_;
  Vector v_;
};

struct GaussianCenter {
  Vector mean;
  Eigen::MatrixXd covariance;
};

/// f(x; mean, cov) = exp(-(x - mean)^T cov^{-1} (x - mean) / 2) / (2 pi sqrt|cov|).
/// The 2 pi normalization is used for every dimension. Throws
/// std::invalid_argument for a singular or non-positive-definite covariance.
double gaussian_kernel(const Vector& x, const GaussianCenter& center);

class GaussianKernelRegressor {
 public:
  GaussianKernelRegressor(std::vector<GaussianCenter> centers, double mu);

  /// Uses the first m entries of x_ext for the kernels, all of x_ext for the
  /// per-center affine regressors.
  double predict(const Vector& x_ext) const;
  void update(const Vector& x_ext, double error);
  StepOutcome step(const Vector& x_ext, double desired);

  std::size_t center_count() const { return centers_.size(); }
  const Vector& weights(std::size_t i) const { return v_.at(i); }
  std::vector<double> kernel_values(const Vector& x_ext) const;

  Json snapshot() const;
  static GaussianKernelRegressor restore(const Json& snapshot);

 private:
  struct Prepared {
    Vector mean;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd precision;
    double scale;
  };

  std::vector<Prepared> centers_;
  double mu_;
  std::vector<Vector> v_;
};

}  // namespace treereg
