#pragma once

// Finitely supported vectors on the tree of finite sequences and the exact
// Z_{p,q} norm
//
//   ||z|| = sup ( sum_i ( sum_{t in seg_i} |z(t)|^p )^{q/p} )^{1/q}
//
// over families of pairwise incomparable nonempty segments.
//
// Evaluation is a dynamic program over the closure of the support. For a
// node t let
//
//   g(t) = |z(t)|^p + max(0, max_c g(c))          best segment mass from t
//   h(t) = max( g(t)^{q/p}, sum_c h(c) )           best family inside t's subtree
//
// A family in the subtree of t either contains a segment whose minimum is t,
// and then no other segment fits (its minimum would be comparable with t),
// or it splits into independent families below the children of t.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssrank/node.hpp"
#include "ssrank/schreier.hpp"
#include "ssrank/tree.hpp"

namespace ssrank {

class Exponents {
 public:
  Exponents(double p, double q) : p_(p), q_(q) {
    if (!(std::isfinite(p) && std::isfinite(q) && p >= 1 && q >= p)) {
      throw std::invalid_argument("Exponents: need 1 <= p <= q < inf");
    }
  }
  double p() const { return p_; }
  double q() const { return q_; }
  double ratio() const { return q_ / p_; }

 private:
  double p_;
  double q_;
};

class SparseTreeVector {
 public:
  using Map = std::map<Node, double>;

  SparseTreeVector() = default;
  SparseTreeVector(std::initializer_list<std::pair<const Node, double>> entries) {
    for (const auto& [node, value] : entries) set(node, value);
  }

  void set(const Node& t, double value) {
    if (value == 0.0) {
      entries_.erase(t);
    } else {
      entries_[t] = value;
    }
  }
  void add(const Node& t, double value) { set(t, at(t) + value); }
  double at(const Node& t) const {
    auto it = entries_.find(t);
    return it == entries_.end() ? 0.0 : it->second;
  }

  const Map& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }
  NodeSet support() const {
    NodeSet s;
    for (const auto& [node, value] : entries_) s.insert(node);
    return s;
  }

  SparseTreeVector& operator+=(const SparseTreeVector& o) {
    for (const auto& [node, value] : o.entries_) add(node, value);
    return *this;
  }
  SparseTreeVector& operator*=(double c) {
    if (c == 0.0) {
      entries_.clear();
    } else {
      for (auto& [node, value] : entries_) value *= c;
    }
    return *this;
  }
  friend SparseTreeVector operator+(SparseTreeVector a, const SparseTreeVector& b) { return a += b; }
  friend SparseTreeVector operator*(double c, SparseTreeVector v) { return v *= c; }

  friend bool operator==(const SparseTreeVector&, const SparseTreeVector&) = default;

 private:
  Map entries_;
};

inline SparseTreeVector unit_vector(const Node& t, double value = 1.0) {
  SparseTreeVector v;
  v.set(t, value);
  return v;
}

namespace detail {

inline double pmass(double value, double p) { return std::pow(std::fabs(value), p); }

// The support closure as an explicit forest, indexed in chi order (parents
// before children).
struct ClosureForest {
  std::vector<Node> nodes;
  std::vector<double> values;
  std::vector<std::vector<std::size_t>> children;  // in chi order

  explicit ClosureForest(const SparseTreeVector& z) {
    const NodeSet all = closure(z.support());
    nodes.assign(all.begin(), all.end());
    std::map<Node, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);
    values.resize(nodes.size());
    children.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      values[i] = z.at(nodes[i]);
      if (!nodes[i].is_root()) children[index.at(nodes[i].parent())].push_back(i);
    }
  }
};

struct NormProgram {
  ClosureForest forest;
  std::vector<double> g;
  std::vector<double> h;

  NormProgram(const Exponents& e, const SparseTreeVector& z) : forest(z) {
    const std::size_t n = forest.nodes.size();
    g.assign(n, 0.0);
    h.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
      double best_child = 0.0;
      double family = 0.0;
      for (std::size_t c : forest.children[k]) {
        best_child = std::max(best_child, g[c]);
        family += h[c];
      }
      g[k] = pmass(forest.values[k], e.p()) + best_child;
      h[k] = std::max(std::pow(g[k], e.ratio()), family);
    }
  }

  // Segment with minimum forest.nodes[k], continued through the best child
  // (first in chi order on ties) while the remaining mass is positive.
  Segment segment_from(std::size_t k) const {
    std::size_t cur = k;
    while (true) {
      std::optional<std::size_t> best;
      for (std::size_t c : forest.children[cur]) {
        if (g[c] > 0.0 && (!best || g[c] > g[*best])) best = c;
      }
      if (!best) break;
      cur = *best;
    }
    return Segment::between(forest.nodes[k], forest.nodes[cur]);
  }
};

}  // namespace detail

inline double znorm(const Exponents& e, const SparseTreeVector& z) {
  if (z.is_zero()) return 0.0;
  const detail::NormProgram dp(e, z);
  return std::pow(dp.h.front(), 1.0 / e.q());
}

struct SegmentMass {
  Segment segment;
  double mass;  // (sum over the segment of |z(t)|^p)^{1/p}
};

// A family of pairwise incomparable segments attaining znorm(e, z).
inline std::vector<SegmentMass> optimal_segment_family(const Exponents& e, const SparseTreeVector& z) {
  std::vector<SegmentMass> out;
  if (z.is_zero()) return out;
  const detail::NormProgram dp(e, z);
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    double family = 0.0;
    for (std::size_t c : dp.forest.children[k]) family += dp.h[c];
    if (dp.g[k] > 0.0 && std::pow(dp.g[k], e.ratio()) >= family) {
      out.push_back({dp.segment_from(k), std::pow(dp.g[k], 1.0 / e.p())});
    } else {
      const auto& ch = dp.forest.children[k];
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
  }
  return out;
}

struct SegmentProjection {
  double value;
  Segment segment;
};

// Largest ||P_seg(z)|| over all segments. Ties go to the segment whose
// minimal node comes first in chi order.
inline SegmentProjection max_segment_projection(const Exponents& e, const SparseTreeVector& z) {
  if (z.is_zero()) throw std::invalid_argument("max_segment_projection: zero vector");
  const detail::NormProgram dp(e, z);
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < dp.g.size(); ++k) {
    if (dp.forest.values[k] == 0.0) continue;  // starts at a support node
    if (!best || dp.g[k] > dp.g[*best]) best = k;
  }
  return {std::pow(dp.g[*best], 1.0 / e.p()), dp.segment_from(*best)};
}

// P_A(z)
inline SparseTreeVector project(const NodeSet& nodes, const SparseTreeVector& z) {
  SparseTreeVector out;
  for (const auto& [node, value] : z.entries()) {
    if (nodes.contains(node)) out.set(node, value);
  }
  return out;
}

inline double lp_norm(double p, std::span<const double> values) {
  if (!(p >= 1)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double sum = 0.0;
  for (double v : values) sum += detail::pmass(v, p);
  return std::pow(sum, 1.0 / p);
}

// ||P_c(z)|| = (sum_{t in c} |z(t)|^p)^{1/p} for a chain c.
inline double chain_projection_norm(const Exponents& e, const std::vector<Node>& chain,
                                    const SparseTreeVector& z) {
  if (!is_chain(chain)) throw std::invalid_argument("chain_projection_norm: nodes do not form a chain");
  std::vector<double> values;
  for (const Node& t : NodeSet(chain.begin(), chain.end())) values.push_back(z.at(t));
  return lp_norm(e.p(), values);
}

// Exhaustive evaluation of the defining supremum over families of pairwise
// incomparable segments inside the support closure. Test oracle only.
inline double znorm_bruteforce(const Exponents& e, const SparseTreeVector& z) {
  const NodeSet nodes = closure(z.support());
  constexpr std::size_t kGuard = 12;
  if (nodes.size() > kGuard && !guard_override()) {
    throw std::length_error("znorm_bruteforce: support closure exceeds 12 nodes");
  }
  struct Candidate {
    std::vector<Node> nodes;
    double weight;  // (segment p-mass)^{q/p}
  };
  std::vector<Candidate> segments;
  for (const Node& top : nodes) {
    for (const Node& bottom : nodes) {
      if (!top.is_prefix_of(bottom)) continue;
      Candidate c;
      double mass = 0.0;
      for (std::size_t len = top.length(); len <= bottom.length(); ++len) {
        c.nodes.push_back(bottom.prefix(len));
        mass += detail::pmass(z.at(c.nodes.back()), e.p());
      }
      c.weight = std::pow(mass, e.ratio());
      segments.push_back(std::move(c));
    }
  }
  const auto disjoint_incomparable = [](const Candidate& a, const Candidate& b) {
    for (const Node& s : a.nodes) {
      for (const Node& t : b.nodes) {
        if (comparable(s, t)) return false;
      }
    }
    return true;
  };
  double best = 0.0;
  std::vector<std::size_t> chosen;
  const std::function<void(std::size_t, double)> search = [&](std::size_t from, double total) {
    best = std::max(best, total);
    for (std::size_t j = from; j < segments.size(); ++j) {
      bool ok = true;
      for (std::size_t c : chosen) {
        if (!disjoint_incomparable(segments[c], segments[j])) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      chosen.push_back(j);
      search(j + 1, total + segments[j].weight);
      chosen.pop_back();
    }
  };
  search(0, 0.0);
  return std::pow(best, 1.0 / e.q());
}

}  // namespace ssrank
