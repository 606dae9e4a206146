#pragma once

// Partition combinatorics of the complete depth-d binary tree.
//
// A partition (model) is a set of node labels whose regions tile the
// regressor space. beta(d) counts them, gamma(d, l) counts the partitions in
// which a fixed node at depth l is a leaf, and rho(p, q, d) counts the
// partitions in which both p and q are leaves. The collapsed learners use rho
// to turn per-node weights into per-node combination coefficients (kappa).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "treereg/node_label.hpp"

namespace treereg {

using Count = std::uint64_t;

/// Largest j for which beta(j) fits in a Count.
inline constexpr int kMaxBetaIndex = 6;
/// Largest depth accepted by RhoTable and the learners built on it.
inline constexpr int kMaxTableDepth = 5;
/// Largest depth accepted by enumerate_partitions by default.
inline constexpr int kDefaultEnumerationCap = 4;

/// Root-to-p prefixes of p, root first; size l(p)+1.
std::vector<NodeLabel> prefixes(NodeLabel p);

/// All labels of the depth-d tree having p as a prefix (p included), in
/// index order. Throws std::invalid_argument if l(p) > d.
std::vector<NodeLabel> span(NodeLabel p, int depth);

/// beta_0 = 1, beta_{j+1} = beta_j^2 + 1. Throws std::overflow_error past
/// kMaxBetaIndex and std::invalid_argument for j < 0.
Count beta(int j);

/// prod_{j=1..l} beta_{d-j}; gamma(d, 0) = 1. Throws std::out_of_range
/// unless 0 <= l <= d.
Count gamma(int depth, int level);

/// Number of partitions of the depth-d tree having both p and q as leaves.
Count rho(NodeLabel p, NodeLabel q, int depth);

/// kappa_p = sum_q rho(p, q) w_q, with `weights` indexed by NodeLabel::index().
/// Throws std::invalid_argument if `weights` does not cover the tree.
double kappa(NodeLabel p, std::span<const double> weights, int depth);

struct Partition {
  std::vector<NodeLabel> leaves;  // sorted by index

  bool contains(NodeLabel p) const;
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// All beta(d) partitions, built recursively: a node is either a leaf or the
/// union of one partition from each child subtree.
std::vector<Partition> enumerate_partitions(int depth, int cap = kDefaultEnumerationCap);

/// Dense rho table for one depth, with the nonzero entries of each row kept
/// separately so kappa accumulations skip structural zeros.
class RhoTable {
 public:
  struct Entry {
    std::size_t column;
    double value;
  };

  explicit RhoTable(int depth);

  int depth() const { return depth_; }
  std::size_t size() const { return size_; }
  Count at(std::size_t row, std::size_t column) const { return counts_[row * size_ + column]; }
  std::span<const Entry> row(std::size_t row) const { return rows_[row]; }

  /// kappa for the node with index `row`; adds the number of multiply-adds
  /// performed to `*accumulations` when non-null.
  double kappa(std::size_t row, std::span<const double> weights, std::size_t* accumulations = nullptr) const;

 private:
  int depth_;
  std::size_t size_;
  std::vector<Count> counts_;
  std::vector<std::vector<Entry>> rows_;
};

}  // namespace treereg
