#pragma once

// Region separators. A separator splits a node's region in two; its output s
// is the branch factor of child 0, and 1 - s that of child 1.
//
//   soft: s = s_plus + (1 - 2 s_plus) / (1 + exp(x^T theta))
//   hard: s = 1 if x^T theta < 0 else 0   (the soft limit as |theta| -> inf)
//
// x is the extended regressor [x; 1], so the offset lives in theta's last
// entry.

#include <span>
#include <vector>

#include "treereg/common.hpp"
#include "treereg/node_label.hpp"

namespace treereg {

enum class SeparatorMode { hard, soft };

/// How the soft separator's gradient is formed.
///   exact:          d s / d theta of the clamped function,
///                   -(1 - 2 s_plus) u (1 - u) x with u the plain logistic.
///   clamped_product: -s (1 - s) x using the clamped s (equal when s_plus = 0).
enum class GradientForm { exact, clamped_product };

struct Separator {
  Vector theta;
  double s_plus = 0.0;
  SeparatorMode mode = SeparatorMode::soft;

  /// Throws std::invalid_argument unless 0 <= s_plus < 0.5.
  static Separator soft(Vector theta, double s_plus);
  static Separator hard(Vector theta);

  double evaluate(const Vector& x_ext) const;
  /// Unclamped logistic 1 / (1 + exp(x^T theta)).
  double logistic(const Vector& x_ext) const;
  /// Scalar g with d s / d theta = -g x (soft mode only).
  double slope(const Vector& x_ext, GradientForm form = GradientForm::exact) const;
  Vector gradient(const Vector& x_ext, GradientForm form = GradientForm::exact) const;
};

/// Numerically stable 1 / (1 + exp(z)).
double logistic_of(double z);

/// s for q = 0, 1 - s for q = 1.
inline double branch_factor(double s, int q) { return q == 0 ? s : 1.0 - s; }

/// Product of branch factors along the root-to-p path; 1 at the root.
/// `separator_values` is indexed by NodeLabel::index() and must cover every
/// strict prefix of p.
double path_product(NodeLabel p, std::span<const double> separator_values);

/// Default direction vectors for the internal nodes of a depth-d tree over
/// an m-dimensional input, in node-index order. Entry i (1-based) of node p is
/// -1 when i = l(p) (mod d), otherwise 0; offsets are 0. For d = m = 2 the
/// leaves are the four quadrants.
std::vector<Vector> initial_directions(int depth, int input_dim);

}  // namespace treereg
