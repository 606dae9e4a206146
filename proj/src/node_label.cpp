#include "treereg/node_label.hpp"

#include <algorithm>
#include <stdexcept>

namespace treereg {

NodeLabel NodeLabel::parse(std::string_view text) {
  if (text.empty() || text == "-" || text == "\xCE\xBB") return root();
  if (text.size() > static_cast<std::size_t>(kMaxLength)) {
    throw std::invalid_argument("node label too long: " + std::string(text));
  }
  std::uint32_t bits = 0;
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("node label must be a 0/1 string: " + std::string(text));
    }
    bits = (bits << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return NodeLabel(static_cast<int>(text.size()), bits);
}

NodeLabel NodeLabel::from_bits(int length, std::uint32_t bits) {
  if (length < 0 || length > kMaxLength) throw std::invalid_argument("node label length out of range");
  if (length < 32 && (bits >> length) != 0) throw std::invalid_argument("node label bits exceed length");
  return NodeLabel(length, bits);
}

NodeLabel NodeLabel::child(int bit) const {
  if (length_ >= kMaxLength) throw std::length_error("node label too long");
  return NodeLabel(length_ + 1, (bits_ << 1) | static_cast<std::uint32_t>(bit & 1));
}

NodeLabel NodeLabel::parent() const {
  if (is_root()) throw std::logic_error("root has no parent");
  return NodeLabel(length_ - 1, bits_ >> 1);
}

NodeLabel NodeLabel::prefix(int length) const {
  if (length < 0 || length > length_) throw std::out_of_range("prefix length out of range");
  return NodeLabel(length, bits_ >> (length_ - length));
}

std::string NodeLabel::to_string() const {
  std::string out(static_cast<std::size_t>(length_), '0');
  for (int i = 0; i < length_; ++i) out[static_cast<std::size_t>(i)] = letter(i) ? '1' : '0';
  return out;
}

NodeLabel longest_common_prefix(NodeLabel a, NodeLabel b) {
  int length = std::min(a.length(), b.length());
  while (length > 0 && a.prefix(length) != b.prefix(length)) --length;
  return a.prefix(length);
}

TreeShape::TreeShape(int depth) : depth_(depth) {
  if (depth < 0 || depth > NodeLabel::kMaxLength - 1) throw std::invalid_argument("tree depth out of range");
}

std::vector<NodeLabel> TreeShape::nodes() const {
  std::vector<NodeLabel> out;
  out.reserve(node_count());
  for (std::size_t i = 0; i < node_count(); ++i) out.push_back(NodeLabel::from_index(i));
  return out;
}

std::vector<NodeLabel> TreeShape::leaves() const {
  std::vector<NodeLabel> out;
  out.reserve(leaf_count());
  for (std::size_t i = internal_count(); i < node_count(); ++i) out.push_back(NodeLabel::from_index(i));
  return out;
}

}  // namespace treereg
