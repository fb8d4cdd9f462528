#pragma once

// Finite trees (sets of nodes closed under initial segments), derivatives,
// orders, segments and maximal chains.

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ssrank/node.hpp"

namespace ssrank {

using NodeSet = std::set<Node>;  // iterates in chi order

// Smallest tree containing `nodes`.
inline NodeSet closure(const NodeSet& nodes) {
  NodeSet out;
  for (const Node& s : nodes) {
    for (std::size_t len = 0; len <= s.length(); ++len) out.insert(s.prefix(len));
  }
  return out;
}

inline bool is_closed(const NodeSet& nodes) {
  return std::all_of(nodes.begin(), nodes.end(), [&](const Node& s) {
    return s.is_root() || nodes.contains(s.parent());
  });
}

class FiniteTree {
 public:
  FiniteTree() = default;
  // Throws unless `nodes` is closed under initial segments.
  explicit FiniteTree(NodeSet nodes) : nodes_(std::move(nodes)) {
    if (!is_closed(nodes_)) {
      throw std::invalid_argument("FiniteTree: node set is not closed under initial segments");
    }
  }
  static FiniteTree closure_of(const NodeSet& nodes) { return FiniteTree(ssrank::closure(nodes)); }

  const NodeSet& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  bool contains(const Node& s) const { return nodes_.contains(s); }

  // Nodes of the tree that have no proper extension in it.
  std::vector<Node> leaves() const {
    NodeSet internal;
    for (const Node& s : nodes_) {
      if (!s.is_root()) internal.insert(s.parent());
    }
    std::vector<Node> out;
    for (const Node& s : nodes_) {
      if (!internal.contains(s)) out.push_back(s);
    }
    return out;
  }

  friend bool operator==(const FiniteTree&, const FiniteTree&) = default;

 private:
  NodeSet nodes_;
};

// S' = {s in S : some t in S properly extends s}.
inline FiniteTree derivative(const FiniteTree& tree) {
  NodeSet out;
  for (const Node& s : tree.nodes()) {
    if (!s.is_root()) out.insert(s.parent());
  }
  return FiniteTree(std::move(out));
}

// Least k with the k-th derivative empty, i.e. the number of nodes on a
// longest chain.
inline std::size_t order(const FiniteTree& tree) {
  if (tree.empty()) return 0;
  std::size_t longest = 0;
  for (const Node& s : tree.nodes()) longest = std::max(longest, s.length());
  return longest + 1;
}

// Root-to-leaf paths; these are the maximal chains of a finite tree.
inline std::vector<std::vector<Node>> maximal_chains(const FiniteTree& tree) {
  std::vector<std::vector<Node>> out;
  for (const Node& leaf : tree.leaves()) {
    std::vector<Node> chain;
    for (std::size_t len = 0; len <= leaf.length(); ++len) chain.push_back(leaf.prefix(len));
    out.push_back(std::move(chain));
  }
  return out;
}

inline bool is_chain(const std::vector<Node>& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (!comparable(nodes[i], nodes[j])) return false;
    }
  }
  return true;
}

// A nonempty convex chain: consecutive one-step extensions of its minimum.
class Segment {
 public:
  // `nodes` in any order; validated for convexity and consecutiveness.
  explicit Segment(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("Segment: must be nonempty");
    std::sort(nodes_.begin(), nodes_.end(),
              [](const Node& a, const Node& b) { return a.length() < b.length(); });
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (nodes_[i].length() != nodes_[i - 1].length() + 1 ||
          !nodes_[i - 1].is_prefix_of(nodes_[i])) {
        throw std::invalid_argument("Segment: nodes are not a consecutive chain");
      }
    }
  }
  // The segment from `top` down to its extension `bottom`.
  static Segment between(const Node& top, const Node& bottom) {
    if (!top.is_prefix_of(bottom)) throw std::invalid_argument("Segment::between: not a chain");
    std::vector<Node> nodes;
    for (std::size_t len = top.length(); len <= bottom.length(); ++len) {
      nodes.push_back(bottom.prefix(len));
    }
    return Segment(std::move(nodes));
  }

  const Node& min() const { return nodes_.front(); }
  const Node& max() const { return nodes_.back(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const Node& t) const {
    return min().is_prefix_of(t) && t.is_prefix_of(max());
  }

  friend bool operator==(const Segment&, const Segment&) = default;

 private:
  std::vector<Node> nodes_;  // ordered from min to max
};

// Two segments are incomparable iff their minimal nodes are.
inline bool segments_incomparable(const Segment& a, const Segment& b) {
  return incomparable(a.min(), b.min());
}

}  // namespace ssrank
