#pragma once

// Lower norm bounds of operator sections on finite spans, and the truncated
// tree of increasing sequences on which the bound stays above 1/m.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ssrank/operators.hpp"
#include "ssrank/schreier.hpp"
#include "ssrank/tree.hpp"
#include "ssrank/zpq.hpp"

namespace ssrank {

enum class RatioMode { certified, heuristic };

struct RatioOptions {
  RatioMode mode = RatioMode::certified;
  double tolerance = 1e-3;         // certified: stop once hi - lo <= tolerance
  std::size_t cell_budget = 200000;  // certified: evaluations before giving up on the tolerance
  // certified: also stop once the bracket lies strictly on one side of this
  std::optional<double> decision_threshold;
  std::size_t restarts = 16;        // heuristic
  std::uint64_t seed = 0;           // heuristic
  // Optional basis: x_n as coefficients over e_1..e_M; default x_n = e_n.
  const std::vector<std::vector<double>>* basis = nullptr;
};

struct RatioBracket {
  double lo;
  double hi;
  bool certified;             // lo is a proven lower bound
  std::vector<double> argmin;  // coefficients attaining hi, normalized in l_p
};

namespace detail {

// x -> ||T x|| / ||x||_p restricted to span{x_l : l in span}.
class RatioObjective {
 public:
  RatioObjective(const OperatorSection& op, const std::vector<std::size_t>& span, const Exponents& e,
                 const std::vector<std::vector<double>>* basis)
      : e_(e) {
    for (std::size_t l : span) {
      if (l < 1 || l > op.dimension()) throw std::invalid_argument("min_ratio: span index out of range");
      std::vector<double> x(op.dimension(), 0.0);
      if (basis) {
        if (l > basis->size()) throw std::invalid_argument("min_ratio: basis has too few vectors");
        const auto& row = (*basis)[l - 1];
        if (row.size() > x.size()) throw std::invalid_argument("min_ratio: basis vector longer than M");
        std::copy(row.begin(), row.end(), x.begin());
      } else {
        x[l - 1] = 1.0;
      }
      images_.push_back(apply(op, x));
      domain_.push_back(std::move(x));
      lip_t_ = std::max(lip_t_, znorm(e, images_.back()));
      lip_x_ = std::max(lip_x_, lp_norm(e.p(), domain_.back()));
    }
  }

  std::size_t dim() const { return images_.size(); }
  double lip_t() const { return lip_t_; }
  double lip_x() const { return lip_x_; }

  struct Value {
    double num;
    double den;
  };
  Value eval(const std::vector<double>& b) const {
    SparseTreeVector y;
    std::vector<double> x(domain_.front().size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] == 0.0) continue;
      y += b[i] * images_[i];
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += b[i] * domain_[i][j];
    }
    return {znorm(e_, y), lp_norm(e_.p(), x)};
  }
  double ratio(const std::vector<double>& b) const {
    const Value v = eval(b);
    if (v.den == 0.0) throw std::invalid_argument("min_ratio: basis vectors are linearly dependent");
    return v.num / v.den;
  }
  std::vector<double> normalized(std::vector<double> b) const {
    const double n = eval(b).den;
    for (double& v : b) v /= n;
    return b;
  }

 private:
  Exponents e_;
  std::vector<SparseTreeVector> images_;
  std::vector<std::vector<double>> domain_;
  double lip_t_ = 0.0;
  double lip_x_ = 0.0;
};

// Directions b with b_face = 1 and |b_i| <= 1 cover the sphere up to sign.
inline std::vector<double> face_point(std::size_t face, const std::vector<double>& free) {
  std::vector<double> b;
  b.reserve(free.size() + 1);
  for (std::size_t i = 0, j = 0; i <= free.size(); ++i) b.push_back(i == face ? 1.0 : free[j++]);
  return b;
}

// Branch and bound over the cube faces. For b within l_1 distance r of the
// cell center c, ||T b|| >= ||T c|| - L_T r and ||b||_p <= ||c||_p + L_X r.
inline RatioBracket certified_min(const RatioObjective& f, const RatioOptions& opt) {
  const std::size_t d = f.dim();
  struct Cell {
    double lb;
    std::size_t face;
    std::vector<double> center;
    double half;
    bool operator>(const Cell& o) const { return lb > o.lb; }
  };
  std::priority_queue<Cell, std::vector<Cell>, std::greater<>> open;
  double hi = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  std::size_t evaluations = 0;

  const auto push = [&](std::size_t face, std::vector<double> center, double half) {
    const std::vector<double> b = face_point(face, center);
    const RatioObjective::Value v = f.eval(b);
    ++evaluations;
    if (v.den == 0.0) throw std::invalid_argument("min_ratio: basis vectors are linearly dependent");
    const double value = v.num / v.den;
    if (value < hi) {
      hi = value;
      best = b;
    }
    const double r = static_cast<double>(d - 1) * half;
    const double lb = std::max(0.0, v.num - f.lip_t() * r) / (v.den + f.lip_x() * r);
    open.push({std::min(lb, value), face, std::move(center), half});
  };

  for (std::size_t face = 0; face < d; ++face) push(face, std::vector<double>(d - 1, 0.0), 1.0);
  double lo = open.top().lb;
  while (!open.empty()) {
    lo = open.top().lb;
    if (hi - lo <= opt.tolerance || evaluations >= opt.cell_budget) break;
    if (opt.decision_threshold && (hi < *opt.decision_threshold || lo >= *opt.decision_threshold)) break;
    Cell cell = open.top();
    open.pop();
    const double h = cell.half / 2;
    for (std::size_t mask = 0; mask < (std::size_t{1} << (d - 1)); ++mask) {
      std::vector<double> c = cell.center;
      for (std::size_t i = 0; i + 1 < d; ++i) c[i] += (mask >> i & 1) ? h : -h;
      push(cell.face, std::move(c), h);
    }
  }
  if (open.empty()) lo = hi;
  return {std::min(lo, hi), hi, true, f.normalized(best)};
}

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline RatioBracket heuristic_min(const RatioObjective& f, const RatioOptions& opt) {
  const std::size_t d = f.dim();
  std::mt19937_64 rng(opt.seed);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_b;
  for (std::size_t r = 0; r < std::max<std::size_t>(opt.restarts, 1); ++r) {
    std::vector<double> b(d);
    for (double& v : b) v = 2 * unit_uniform(rng) - 1;
    if (std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; })) b[0] = 1.0;
    double value = f.ratio(b);
    for (double step = 0.5; step > 1e-9;) {
      bool moved = false;
      for (std::size_t i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> c = b;
          c[i] += sign * step;
          if (f.eval(c).den == 0.0) continue;
          const double v = f.ratio(c);
          if (v < value) {
            value = v;
            b = std::move(c);
            moved = true;
            break;
          }
        }
      }
      if (!moved) step /= 2;
    }
    if (value < best) {
      best = value;
      best_b = b;
    }
  }
  return {best, best, false, f.normalized(best_b)};
}

}  // namespace detail

// Brackets min { ||T x|| : x in span{x_l : l in span}, ||x||_p = 1 }.
inline RatioBracket min_ratio(const OperatorSection& op, const std::vector<std::size_t>& span,
                              const Exponents& e, const RatioOptions& opt = {}) {
  if (span.empty()) throw std::invalid_argument("min_ratio: empty span");
  const detail::RatioObjective f(op, span, e, opt.basis);
  if (f.dim() == 1) {
    const double v = f.ratio({1.0});
    return {v, v, true, f.normalized({1.0})};
  }
  if (opt.mode == RatioMode::certified) {
    if (f.dim() > 3) throw std::invalid_argument("min_ratio: certified mode needs at most 3 span vectors");
    return detail::certified_min(f, opt);
  }
  return detail::heuristic_min(f, opt);
}

struct SingTreeOptions {
  RatioOptions ratio;           // mode applies to spans of dimension <= 3; larger spans are heuristic
  std::size_t threads = 0;      // 0: hardware concurrency
};

struct SingTreeResult {
  FiniteTree tree;           // nodes are increasing sequences (n_1 < ... < n_k)
  std::size_t order;
  std::vector<Node> flagged;  // members whose membership rests on an undecided bracket
};

namespace detail {

inline void increasing_sequences(std::uint64_t universe, std::size_t cap, std::vector<Node::value_type>& cur,
                                 std::vector<Node>& out) {
  out.emplace_back(cur);
  if (cur.size() == cap) return;
  for (std::uint64_t v = cur.empty() ? 1 : cur.back() + 1; v <= universe; ++v) {
    cur.push_back(v);
    increasing_sequences(universe, cap, cur, out);
    cur.pop_back();
  }
}

// l dominates s if |l| <= |s| and l_i >= s_i for i <= |l|.
inline bool dominates(const Node& l, const Node& s) {
  if (l.length() > s.length()) return false;
  for (std::size_t i = 0; i < l.length(); ++i) {
    if (l[i] < s[i]) return false;
  }
  return true;
}

}  // namespace detail

// The tree of (n_1 < ... < n_k), k <= cap, n_k <= universe, such that every
// span of x_{l_1}, ..., x_{l_d} with d <= k and n_i <= l_i <= universe has
// min_ratio >= 1/m. A span is rejected only when its attained value `hi`
// is below 1/m, so the tree does not depend on how tight the brackets are
// and grows with m.
inline SingTreeResult sing_tree(const OperatorSection& op, std::int64_t m, std::int64_t universe,
                                std::int64_t cap, const Exponents& e, const SingTreeOptions& opt = {}) {
  if (m < 1) throw std::invalid_argument("sing_tree: m must be >= 1");
  if (universe < 1 || cap < 0) throw std::invalid_argument("sing_tree: bad universe or depth cap");
  if (static_cast<std::size_t>(universe) > op.dimension()) {
    throw std::invalid_argument("sing_tree: universe exceeds the operator dimension");
  }
  if ((universe > 12 || cap > 4) && !guard_override()) {
    throw std::length_error("sing_tree: universe must be <= 12 and depth cap <= 4");
  }

  std::vector<Node> seqs;
  std::vector<Node::value_type> cur;
  detail::increasing_sequences(static_cast<std::uint64_t>(universe), static_cast<std::size_t>(cap), cur, seqs);

  enum class Verdict { pass, fail, undecided };
  std::vector<Verdict> verdict(seqs.size(), Verdict::pass);
  const double threshold = 1.0 / static_cast<double>(m);
  const auto decide = [&](std::size_t i) {
    const Node& l = seqs[i];
    if (l.is_root()) return Verdict::pass;
    std::vector<std::size_t> span(l.entries().begin(), l.entries().end());
    RatioOptions ro = opt.ratio;
    if (span.size() > 3) ro.mode = RatioMode::heuristic;
    ro.seed = opt.ratio.seed + i;
    ro.decision_threshold = threshold;
    const RatioBracket b = min_ratio(op, span, e, ro);
    if (b.hi < threshold * (1 - 1e-12)) return Verdict::fail;
    if (b.certified && b.lo >= threshold * (1 - 1e-12)) return Verdict::pass;
    return Verdict::undecided;
  };

  std::size_t threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, seqs.size());
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < threads; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < seqs.size(); i += threads) verdict[i] = decide(i);
    }));
  }
  for (auto& j : jobs) j.get();

  NodeSet nodes;
  std::vector<Node> flagged;
  for (const Node& s : seqs) {
    bool rejected = false;
    bool undecided = false;
    for (std::size_t i = 0; i < seqs.size() && !rejected; ++i) {
      if (seqs[i].is_root() || !detail::dominates(seqs[i], s)) continue;
      rejected = verdict[i] == Verdict::fail;
      undecided = undecided || verdict[i] == Verdict::undecided;
    }
    if (rejected) continue;
    nodes.insert(s);
    if (undecided) flagged.push_back(s);
  }
  FiniteTree tree(std::move(nodes));
  const std::size_t o = order(tree);
  return {std::move(tree), o, std::move(flagged)};
}

}  // namespace ssrank
