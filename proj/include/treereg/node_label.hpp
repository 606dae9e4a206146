#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace treereg {

/// Address of a node in a complete binary tree: a string over {0,1}.
///
/// The empty string is the root. Appending 0 selects the lower child and
/// appending 1 the upper child. Labels are stored as (length, bits) with the
/// first letter in the most significant position, so a prefix of length k is
/// `bits >> (length - k)`.
///
/// Labels order by (length, numeric value). `index()` maps that order onto
/// 0..2^{d+1}-2 (heap layout), which is how all per-node arrays are indexed.
class NodeLabel {
 public:
  static constexpr int kMaxLength = 30;

  constexpr NodeLabel() = default;

  static constexpr NodeLabel root() { return {}; }

  /// Parses "", "λ" or "-" as the root; otherwise a string of '0'/'1'.
  static NodeLabel parse(std::string_view text);

  static constexpr NodeLabel from_index(std::size_t index) {
    int length = 0;
    while ((std::size_t{2} << length) - 1 <= index) ++length;
    return NodeLabel(length, static_cast<std::uint32_t>(index - ((std::size_t{1} << length) - 1)));
  }

  static NodeLabel from_bits(int length, std::uint32_t bits);

  constexpr int length() const { return length_; }
  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool is_root() const { return length_ == 0; }

  constexpr std::size_t index() const {
    return (std::size_t{1} << length_) - 1 + bits_;
  }

  /// Letter at 0-based position i (i < length()).
  constexpr int letter(int i) const {
    return static_cast<int>((bits_ >> (length_ - 1 - i)) & 1u);
  }

  /// Last letter; the branch taken from the parent.
  constexpr int last_letter() const { return static_cast<int>(bits_ & 1u); }

  NodeLabel child(int bit) const;
  NodeLabel parent() const;
  NodeLabel prefix(int length) const;

  /// True when this label is a (not necessarily strict) prefix of `other`.
  constexpr bool is_prefix_of(NodeLabel other) const {
    return length_ <= other.length_ && (other.bits_ >> (other.length_ - length_)) == bits_;
  }

  std::string to_string() const;

  friend constexpr bool operator==(NodeLabel, NodeLabel) = default;
  friend constexpr std::strong_ordering operator<=>(NodeLabel a, NodeLabel b) {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  constexpr NodeLabel(int length, std::uint32_t bits) : length_(length), bits_(bits) {}

  int length_ = 0;
  std::uint32_t bits_ = 0;
};

/// Longest label that is a prefix of both arguments.
NodeLabel longest_common_prefix(NodeLabel a, NodeLabel b);

/// Shape of the complete depth-d binary tree.
class TreeShape {
 public:
  explicit TreeShape(int depth);

  int depth() const { return depth_; }
  std::size_t node_count() const { return (std::size_t{2} << depth_) - 1; }
  std::size_t leaf_count() const { return std::size_t{1} << depth_; }
  std::size_t internal_count() const { return leaf_count() - 1; }

  bool contains(NodeLabel p) const { return p.length() <= depth_; }
  bool is_leaf(NodeLabel p) const { return p.length() == depth_; }
  bool is_leaf_index(std::size_t index) const { return index >= internal_count(); }

  /// All labels of length <= d in index order.
  std::vector<NodeLabel> nodes() const;
  /// All labels of length exactly d in index order.
  std::vector<NodeLabel> leaves() const;

 private:
  int depth_;
};

}  // namespace treereg
