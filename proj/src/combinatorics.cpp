#include "treereg/combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace treereg {

std::vector<NodeLabel> prefixes(NodeLabel p) {
  std::vector<NodeLabel> out;
  out.reserve(static_cast<std::size_t>(p.length()) + 1);
  for (int len = 0; len <= p.length(); ++len) out.push_back(p.prefix(len));
  return out;
}

std::vector<NodeLabel> span(NodeLabel p, int depth) {
  if (p.length() > depth) {
    throw std::invalid_argument("span: label " + p.to_string() + " deeper than tree depth " + std::to_string(depth));
  }
  std::vector<NodeLabel> out;
  out.reserve((std::size_t{2} << (depth - p.length())) - 1);
  for (int extra = 0; extra <= depth - p.length(); ++extra) {
    const std::uint32_t base = p.bits() << extra;
    for (std::uint32_t tail = 0; tail < (std::uint32_t{1} << extra); ++tail) {
      out.push_back(NodeLabel::from_bits(p.length() + extra, base | tail));
    }
  }
  return out;
}

Count beta(int j) {
  if (j < 0) throw std::invalid_argument("beta: negative index");
  if (j > kMaxBetaIndex) throw std::overflow_error("beta: index " + std::to_string(j) + " overflows 64-bit counts");
  Count b = 1;
  for (int i = 0; i < j; ++i) b = b * b + 1;
  return b;
}

namespace {

Count checked_mul(Count a, Count b) {
  Count out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("partition count overflow");
  return out;
}

}  // namespace

Count gamma(int depth, int level) {
  if (level < 0 || level > depth) {
    throw std::out_of_range("gamma: level " + std::to_string(level) + " outside [0, " + std::to_string(depth) + "]");
  }
  Count g = 1;
  for (int j = 1; j <= level; ++j) g = checked_mul(g, beta(depth - j));
  return g;
}

Count rho(NodeLabel p, NodeLabel q, int depth) {
  if (p.length() > depth || q.length() > depth) throw std::invalid_argument("rho: label deeper than tree");
  if (p == q) return gamma(depth, p.length());
  if (p.is_prefix_of(q) || q.is_prefix_of(p)) return 0;
  // The sibling subtree below the branching node must contain q as a leaf
  // instead of being free, which swaps one beta factor for a gamma factor.
  const int branch = longest_common_prefix(p, q).length();
  const int sub_depth = depth - branch - 1;
  const Count numerator = checked_mul(gamma(depth, p.length()), gamma(sub_depth, q.length() - branch - 1));
  const Count denominator = beta(sub_depth);
  if (numerator % denominator != 0) throw std::logic_error("rho: inexact quotient");
  return numerator / denominator;
}

double kappa(NodeLabel p, std::span<const double> weights, int depth) {
  const TreeShape shape(depth);
  if (weights.size() != shape.node_count()) {
    throw std::invalid_argument("kappa: expected " + std::to_string(shape.node_count()) + " weights, got " +
                                std::to_string(weights.size()));
  }
  double k = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const Count r = rho(p, NodeLabel::from_index(i), depth);
    if (r != 0) k += static_cast<double>(r) * weights[i];
  }
  return k;
}

bool Partition::contains(NodeLabel p) const {
  return std::binary_search(leaves.begin(), leaves.end(), p);
}

namespace {

std::vector<Partition> partitions_below(NodeLabel node, int remaining) {
  std::vector<Partition> out;
  out.push_back(Partition{{node}});
  if (remaining == 0) return out;
  const auto lower = partitions_below(node.child(0), remaining - 1);
  const auto upper = partitions_below(node.child(1), remaining - 1);
  out.reserve(1 + lower.size() * upper.size());
  for (const auto& a : lower) {
    for (const auto& b : upper) {
      Partition joined;
      joined.leaves.reserve(a.leaves.size() + b.leaves.size());
      joined.leaves.insert(joined.leaves.end(), a.leaves.begin(), a.leaves.end());
      joined.leaves.insert(joined.leaves.end(), b.leaves.begin(), b.leaves.end());
      out.push_back(std::move(joined));
    }
  }
  return out;
}

}  // namespace

std::vector<Partition> enumerate_partitions(int depth, int cap) {
  if (depth < 0) throw std::invalid_argument("enumerate_partitions: negative depth");
  if (depth > cap) {
    throw std::length_error("enumerate_partitions: depth " + std::to_string(depth) + " exceeds cap " +
                            std::to_string(cap));
  }
  auto out = partitions_below(NodeLabel::root(), depth);
  for (auto& part : out) std::sort(part.leaves.begin(), part.leaves.end());
  return out;
}

RhoTable::RhoTable(int depth) : depth_(depth) {
  if (depth < 0 || depth > kMaxTableDepth) {
    throw std::invalid_argument("RhoTable: depth " + std::to_string(depth) + " outside [0, " +
                                std::to_string(kMaxTableDepth) + "]");
  }
  size_ = TreeShape(depth).node_count();
  counts_.resize(size_ * size_);
  rows_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = 0; j < size_; ++j) {
      const Count r = rho(NodeLabel::from_index(i), NodeLabel::from_index(j), depth);
      counts_[i * size_ + j] = r;
      if (r != 0) rows_[i].push_back({j, static_cast<double>(r)});
    }
  }
}

double RhoTable::kappa(std::size_t row, std::span<const double> weights, std::size_t* accumulations) const {
  if (weights.size() != size_) throw std::invalid_argument("RhoTable::kappa: weight count mismatch");
  double k = 0.0;
  for (const Entry& e : rows_[row]) k += e.value * weights[e.column];
  if (accumulations) *accumulations += rows_[row].size();
  return k;
}

}  // namespace treereg
