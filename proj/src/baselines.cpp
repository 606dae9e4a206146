#include "treereg/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace treereg {

LinearFilter::LinearFilter(int input_dim, double mu) : mu_(mu), v_(Vector::Zero(input_dim + 1)) {
  if (input_dim < 1) throw std::invalid_argument("LinearFilter: input_dim must be >= 1");
}

double LinearFilter::predict(const Vector& x_ext) const {
  require_dimension(x_ext, v_.size(), "LinearFilter input");
  return v_.dot(x_ext);
}

void LinearFilter::update(const Vector& x_ext, double error) { v_ += (mu_ * error) * x_ext; }

StepOutcome LinearFilter::step(const Vector& x_ext, double desired) {
  const double y = predict(x_ext);
  update(x_ext, desired - y);
  return {y, desired - y};
}

void LinearFilter::set_weights(Vector v) {
  require_dimension(v, v_.size(), "LinearFilter weights");
  v_ = std::move(v);
}

Json LinearFilter::snapshot() const { return Json{{"kind", "lf"}, {"mu", mu_}, {"v", vector_to_json(v_)}}; }

LinearFilter LinearFilter::restore(const Json& snapshot) {
  const Vector v = vector_from_json(snapshot.at("v"));
  LinearFilter out(static_cast<int>(v.size()) - 1, snapshot.at("mu").get<double>());
  out.v_ = v;
  return out;
}

std::size_t volterra_dimension(int input_dim, int order) {
  // sum_{q=0..order} C(m + q - 1, q)
  std::size_t total = 0;
  std::size_t term = 1;  // C(m - 1, 0)
  for (int q = 0; q <= order; ++q) {
    if (q > 0) term = term * static_cast<std::size_t>(input_dim + q - 1) / static_cast<std::size_t>(q);
    total += term;
  }
  return total;
}

Vector volterra_features(const Vector& x, int order) {
  if (order != 2 && order != 3) throw std::invalid_argument("volterra_features: order must be 2 or 3");
  const Eigen::Index m = x.size();
  Vector out(static_cast<Eigen::Index>(volterra_dimension(static_cast<int>(m), order)));
  Eigen::Index at = 0;
  out[at++] = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) out[at++] = x[i];
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) out[at++] = x[i] * x[j];
  if (order == 3) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i; j < m; ++j)
        for (Eigen::Index k = j; k < m; ++k) out[at++] = x[i] * x[j] * x[k];
  }
  return out;
}

VolterraFilter::VolterraFilter(int input_dim, int order, double mu)
    : input_dim_(input_dim), order_(order), mu_(mu) {
  if (input_dim < 1) throw std::invalid_argument("VolterraFilter: input_dim must be >= 1");
  if (order != 2 && order != 3) throw std::invalid_argument("VolterraFilter: order must be 2 or 3");
  v_ = Vector::Zero(static_cast<Eigen::Index>(volterra_dimension(input_dim, order)));
}

Vector VolterraFilter::features(const Vector& x_ext) const {
  require_dimension(x_ext, input_dim_ + 1, "VolterraFilter input");
  return volterra_features(x_ext.head(input_dim_), order_);
}

double VolterraFilter::predict(const Vector& x_ext) const { return v_.dot(features(x_ext)); }

void VolterraFilter::update(const Vector& x_ext, double error) { v_ += (mu_ * error) * features(x_ext); }

StepOutcome VolterraFilter::step(const Vector& x_ext, double desired) {
  const Vector phi = features(x_ext);
  const double y = v_.dot(phi);
  v_ += (mu_ * (desired - y)) * phi;
  return {y, desired - y};
}

Json VolterraFilter::snapshot() const {
  return Json{{"kind", "vf"}, {"input_dim", input_dim_}, {"order", order_}, {"mu", mu_}, {"v", vector_to_json(v_)}};
}

VolterraFilter VolterraFilter::restore(const Json& snapshot) {
  VolterraFilter out(snapshot.at("input_dim").get<int>(), snapshot.at("order").get<int>(),
                     snapshot.at("mu").get<double>());
  Vector v = vector_from_json(snapshot.at("v"));
  require_dimension(v, out.v_.size(), "VolterraFilter snapshot");
  out.v_ = std::move(v);
  return out;
}

double gaussian_kernel(const Vector& x, const GaussianCenter& center) {
  require_dimension(center.mean, x.size(), "gaussian_kernel mean");
  if (center.covariance.rows() != x.size() || center.covariance.cols() != x.size()) {
    throw std::invalid_argument("gaussian_kernel: covariance shape mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(center.covariance);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("gaussian_kernel: covariance not positive definite");
  const double det = center.covariance.determinant();
  if (!(det > 0.0)) throw std::invalid_argument("gaussian_kernel: singular covariance");
  const Vector diff = x - center.mean;
  const double quad = diff.dot(llt.solve(diff));
  return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
}

GaussianKernelRegressor::GaussianKernelRegressor(std::vector<GaussianCenter> centers, double mu) : mu_(mu) {
  if (centers.empty()) throw std::invalid_argument("GaussianKernelRegressor: need at least one center");
  const Eigen::Index m = centers.front().mean.size();
  for (auto& c : centers) {
    require_dimension(c.mean, m, "GaussianKernelRegressor center");
    if (c.covariance.rows() != m || c.covariance.cols() != m) {
      throw std::invalid_argument("GaussianKernelRegressor: covariance shape mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c.covariance);
    const double det = c.covariance.determinant();
    if (llt.info() != Eigen::Success || !(det > 0.0)) {
      throw std::invalid_argument("GaussianKernelRegressor: singular covariance");
    }
    Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(m, m));
    centers_.push_back({c.mean, c.covariance, std::move(precision), 1.0 / (2.0 * std::numbers::pi * std::sqrt(det))});
    v_.push_back(Vector::Zero(m + 1));
  }
}

std::vector<double> GaussianKernelRegressor::kernel_values(const Vector& x_ext) const {
  const Eigen::Index m = centers_.front().mean.size();
  require_dimension(x_ext, m + 1, "GaussianKernelRegressor input");
  std::vector<double> f;
  f.reserve(centers_.size());
  for (const auto& c : centers_) {
    const Vector diff = x_ext.head(m) - c.mean;
    f.push_back(c.scale * std::exp(-0.5 * diff.dot(c.precision * diff)));
  }
  return f;
}

double GaussianKernelRegressor::predict(const Vector& x_ext) const {
  const std::vector<double> f = kernel_values(x_ext);
  double y = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) y += f[i] * v_[i].dot(x_ext);
  return y;
}

void GaussianKernelRegressor::update(const Vector& x_ext, double error) {
  const std::vector<double> f = kernel_values(x_ext);
  for (std::size_t i = 0; i < f.size(); ++i) v_[i] += (mu_ * error * f[i]) * x_ext;
}

StepOutcome GaussianKernelRegressor::step(const Vector& x_ext, double desired) {
  const double y = predict(x_ext);
  update(x_ext, desired - y);
  return {y, desired - y};
}

Json GaussianKernelRegressor::snapshot() const {
  Json centers = Json::array();
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    Json cov = Json::array();
    for (Eigen::Index r = 0; r < centers_[i].covariance.rows(); ++r) {
      cov.push_back(vector_to_json(centers_[i].covariance.row(r).transpose()));
    }
    centers.push_back(Json{{"mean", vector_to_json(centers_[i].mean)}, {"covariance", cov}, {"v", vector_to_json(v_[i])}});
  }
  return Json{{"kind", "gkr"}, {"mu", mu_}, {"centers", centers}};
}

GaussianKernelRegressor GaussianKernelRegressor::restore(const Json& snapshot) {
  std::vector<GaussianCenter> centers;
  for (const Json& c : snapshot.at("centers")) {
    GaussianCenter g;
    g.mean = vector_from_json(c.at("mean"));
    const Json& cov = c.at("covariance");
    g.covariance.resize(g.mean.size(), g.mean.size());
    for (Eigen::Index r = 0; r < g.mean.size(); ++r) g.covariance.row(r) = vector_from_json(cov.at(r)).transpose();
    centers.push_back(std::move(g));
  }
  GaussianKernelRegressor out(std::move(centers), snapshot.at("mu").get<double>());
  std::size_t i = 0;
  for (const Json& c : snapshot.at("centers")) {
    if (c.contains("v")) out.v_[i] = vector_from_json(c.at("v"));
    ++i;
  }
  return out;
}

}  // namespace treereg
