#pragma once

// Nodes of the tree of finite sequences of positive integers, and a fixed
// monotone enumeration chi of all nodes.
//
// chi orders nodes by grade(s) = |s| + sum s(i), then by length, then
// lexicographically. A proper extension adds at least one entry of value
// >= 1, so it raises the grade by at least 2 and chi is strictly monotone
// along end-extension. Node::operator<=> implements exactly this order, so
// ordered containers of nodes iterate in chi order even for nodes whose
// index does not fit into 64 bits.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssrank {

class Node {
 public:
  using value_type = std::uint64_t;

  Node() = default;  // the empty sequence
  explicit Node(std::vector<value_type> entries) : entries_(std::move(entries)) {
    for (value_type v : entries_) {
      if (v == 0) throw std::invalid_argument("Node: entries must be >= 1");
    }
  }
  Node(std::initializer_list<value_type> entries)
      : Node(std::vector<value_type>(entries)) {}

  std::size_t length() const { return entries_.size(); }
  bool is_root() const { return entries_.empty(); }
  std::span<const value_type> entries() const { return entries_; }
  value_type operator[](std::size_t i) const { return entries_[i]; }
  value_type back() const { return entries_.back(); }

  // Sum of entries plus length; saturates at the maximum value_type.
  value_type grade() const {
    value_type g = entries_.size();
    for (value_type v : entries_) {
      if (g > std::numeric_limits<value_type>::max() - v) {
        return std::numeric_limits<value_type>::max();
      }
      g += v;
    }
    return g;
  }

  Node parent() const {
    if (is_root()) throw std::logic_error("Node::parent: root has no parent");
    return prefix(length() - 1);
  }
  Node child(value_type k) const {
    if (k == 0) throw std::invalid_argument("Node::child: entries must be >= 1");
    Node c = *this;
    c.entries_.push_back(k);
    return c;
  }
  // s|len, the initial segment of length len.
  Node prefix(std::size_t len) const {
    if (len > length()) throw std::out_of_range("Node::prefix: length too large");
    Node p;
    p.entries_.assign(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(len));
    return p;
  }

  // this ⊑ t
  bool is_prefix_of(const Node& t) const {
    return length() <= t.length() &&
           std::equal(entries_.begin(), entries_.end(), t.entries_.begin());
  }
  // this ⊏ t
  bool is_proper_prefix_of(const Node& t) const {
    return length() < t.length() && is_prefix_of(t);
  }

  friend bool operator==(const Node&, const Node&) = default;
  friend std::strong_ordering operator<=>(const Node& a, const Node& b) {
    if (auto c = a.grade() <=> b.grade(); c != 0) return c;
    if (auto c = a.length() <=> b.length(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(),
                                                  b.entries_.begin(), b.entries_.end());
  }

  // Text token: "e" for the empty node, otherwise dot-separated entries.
  std::string token() const {
    if (is_root()) return "e";
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out.push_back('.');
      out += std::to_string(entries_[i]);
    }
    return out;
  }
  static Node parse(std::string_view tok);

 private:
  std::vector<value_type> entries_;
};

inline Node Node::parse(std::string_view tok) {
  if (tok == "e") return Node();
  if (tok.empty()) throw std::invalid_argument("Node::parse: empty token");
  std::vector<value_type> entries;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = tok.find('.', pos);
    const std::string_view part = tok.substr(pos, dot == std::string_view::npos ? tok.npos : dot - pos);
    value_type v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || v == 0) {
      throw std::invalid_argument("Node::parse: bad token '" + std::string(tok) + "'");
    }
    entries.push_back(v);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return Node(std::move(entries));
}

inline bool comparable(const Node& a, const Node& b) {
  return a.is_prefix_of(b) || b.is_prefix_of(a);
}
inline bool incomparable(const Node& a, const Node& b) { return !comparable(a, b); }

namespace detail {

using u128 = unsigned __int128;
constexpr u128 kIndexLimit = std::numeric_limits<std::uint64_t>::max();
// Intermediate counts saturate here; far above kIndexLimit so that
// differences of unsaturated counts stay exact.
constexpr u128 kSaturate = u128{1} << 100;

// C(n, k), saturating at kSaturate.
inline u128 binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
    if (r > kSaturate) return kSaturate;
  }
  return r;
}

// Sequences of `len` positive integers with sum `sum`.
inline u128 compositions(std::int64_t sum, std::int64_t len) {
  if (len == 0) return sum == 0 ? 1 : 0;
  return binom(sum - 1, len - 1);
}

// Nodes of grade g.
inline u128 nodes_of_grade(std::int64_t g) {
  u128 total = 0;
  for (std::int64_t len = 0; 2 * len <= g; ++len) {
    total += compositions(g - len, len);
    if (total > kSaturate) return kSaturate;
  }
  return total;
}

}  // namespace detail

// 1-based chi index. Throws std::overflow_error beyond 64 bits.
inline std::uint64_t chi_encode(const Node& s) {
  using detail::u128;
  const auto overflow = [] { return std::overflow_error("chi_encode: index exceeds 64 bits"); };
  const std::uint64_t g64 = s.grade();
  if (g64 > 200) throw overflow();  // nodes_of_grade(g) > 2^64 well before this
  const auto g = static_cast<std::int64_t>(g64);
  const auto len = static_cast<std::int64_t>(s.length());

  u128 idx = 1;
  for (std::int64_t h = 0; h < g; ++h) {
    idx += detail::nodes_of_grade(h);
    if (idx > detail::kIndexLimit) throw overflow();
  }
  for (std::int64_t l = 0; l < len; ++l) idx += detail::compositions(g - l, l);

  // Lexicographic rank among compositions of g - len into len parts.
  std::int64_t remaining = g - len;
  for (std::int64_t j = 0; j < len; ++j) {
    const auto v = static_cast<std::int64_t>(s[static_cast<std::size_t>(j)]);
    const std::int64_t parts = len - j - 1;
    if (parts > 0) {
      // sum over w < v of C(remaining - w - 1, parts - 1) (hockey stick)
      idx += detail::binom(remaining - 1, parts) - detail::binom(remaining - v, parts);
    }
    remaining -= v;
    if (idx > detail::kIndexLimit) throw overflow();
  }
  return static_cast<std::uint64_t>(idx);
}

inline Node chi_decode(std::int64_t n) {
  if (n <= 0) throw std::invalid_argument("chi_decode: index must be >= 1");
  using detail::u128;
  u128 rest = static_cast<u128>(n - 1);
  std::int64_t g = 0;
  for (; rest >= detail::nodes_of_grade(g); ++g) rest -= detail::nodes_of_grade(g);
  std::int64_t len = 0;
  for (; rest >= detail::compositions(g - len, len); ++len) rest -= detail::compositions(g - len, len);

  std::vector<Node::value_type> entries;
  std::int64_t remaining = g - len;
  for (std::int64_t j = 0; j < len; ++j) {
    const std::int64_t parts = len - j - 1;
    std::int64_t v = 1;
    while (true) {
      const u128 block = detail::compositions(remaining - v, parts);
      if (rest < block) break;
      rest -= block;
      ++v;
    }
    entries.push_back(static_cast<Node::value_type>(v));
    remaining -= v;
  }
  return Node(std::move(entries));
}

}  // namespace ssrank
