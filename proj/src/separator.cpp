#include "treereg/separator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treereg {

double logistic_of(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

Separator Separator::soft(Vector theta, double s_plus) {
  if (!(s_plus >= 0.0 && s_plus < 0.5)) throw std::invalid_argument("separator clamp s_plus must lie in [0, 0.5)");
  return Separator{std::move(theta), s_plus, SeparatorMode::soft};
}

Separator Separator::hard(Vector theta) { return Separator{std::move(theta), 0.0, SeparatorMode::hard}; }

namespace {

double projection(const Separator& sep, const Vector& x_ext) {
  require_dimension(x_ext, sep.theta.size(), "separator input");
  const double z = x_ext.dot(sep.theta);
  if (!std::isfinite(z)) throw std::invalid_argument("separator input is not finite");
  return z;
}

}  // namespace

double Separator::logistic(const Vector& x_ext) const { return logistic_of(projection(*this, x_ext)); }

double Separator::evaluate(const Vector& x_ext) const {
  const double z = projection(*this, x_ext);
  if (mode == SeparatorMode::hard) return z < 0.0 ? 1.0 : 0.0;
  // The affine form can round one ulp past 1 - s_plus.
  return std::clamp(s_plus + (1.0 - 2.0 * s_plus) * logistic_of(z), s_plus, 1.0 - s_plus);
}

double Separator::slope(const Vector& x_ext, GradientForm form) const {
  if (mode == SeparatorMode::hard) throw std::logic_error("hard separators have no gradient");
  const double u = logistic(x_ext);
  if (form == GradientForm::exact) return (1.0 - 2.0 * s_plus) * u * (1.0 - u);
  const double s = evaluate(x_ext);
  return s * (1.0 - s);
}

Vector Separator::gradient(const Vector& x_ext, GradientForm form) const { return -slope(x_ext, form) * x_ext; }

double path_product(NodeLabel p, std::span<const double> separator_values) {
  double alpha = 1.0;
  for (int i = 0; i < p.length(); ++i) {
    const std::size_t at = p.prefix(i).index();
    if (at >= separator_values.size()) throw std::invalid_argument("path_product: missing separator value");
    alpha *= branch_factor(separator_values[at], p.letter(i));
  }
  return alpha;
}

std::vector<Vector> initial_directions(int depth, int input_dim) {
  if (depth < 0 || input_dim < 1) throw std::invalid_argument("initial_directions: bad depth or dimension");
  const TreeShape shape(depth);
  std::vector<Vector> out;
  out.reserve(shape.internal_count());
  for (std::size_t k = 0; k < shape.internal_count(); ++k) {
    const int level = NodeLabel::from_index(k).length();
    Vector theta = Vector::Zero(input_dim + 1);
    for (int i = 1; i <= input_dim; ++i) {
      if (i % depth == level % depth) theta[i - 1] = -1.0;
    }
    out.push_back(std::move(theta));
  }
  return out;
}

}  // namespace treereg
