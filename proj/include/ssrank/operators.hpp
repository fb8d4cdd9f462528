#pragma once

// Finite sections of operators l_p -> Z_{p,q}, block sequences in Z_{p,q}
// and asymptotic sparsity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ssrank/node.hpp"
#include "ssrank/tree.hpp"
#include "ssrank/zpq.hpp"

namespace ssrank {

// Images of the unit vectors e_1..e_M.
class OperatorSection {
 public:
  explicit OperatorSection(std::vector<SparseTreeVector> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("OperatorSection: M must be >= 1");
  }

  std::size_t dimension() const { return columns_.size(); }
  // 1-based, as in T(e_n).
  const SparseTreeVector& column(std::size_t n) const {
    if (n < 1 || n > columns_.size()) throw std::out_of_range("OperatorSection: column index");
    return columns_[n - 1];
  }
  const std::vector<SparseTreeVector>& columns() const { return columns_; }

  friend bool operator==(const OperatorSection&, const OperatorSection&) = default;

 private:
  std::vector<SparseTreeVector> columns_;
};

// I(e_n) = e_{chi^{-1}(n)}
inline SparseTreeVector embed_column(std::int64_t n) { return unit_vector(chi_decode(n)); }

// H(S)(e_n) = P_S(I(e_n))
inline SparseTreeVector hs_column(const FiniteTree& tree, std::int64_t n) {
  const Node t = chi_decode(n);
  return tree.contains(t) ? unit_vector(t) : SparseTreeVector{};
}

inline OperatorSection embed_section(std::int64_t m) {
  if (m < 1) throw std::invalid_argument("embed_section: M must be >= 1");
  std::vector<SparseTreeVector> columns;
  for (std::int64_t n = 1; n <= m; ++n) columns.push_back(embed_column(n));
  return OperatorSection(std::move(columns));
}

inline OperatorSection hs_section(const FiniteTree& tree, std::int64_t m) {
  if (m < 1) throw std::invalid_argument("hs_section: M must be >= 1");
  std::vector<SparseTreeVector> columns;
  for (std::int64_t n = 1; n <= m; ++n) columns.push_back(hs_column(tree, n));
  return OperatorSection(std::move(columns));
}

// sum_n a_n T(e_n). A function object, so that calls with std:: argument
// types never find std::apply.
inline constexpr struct ApplyFn {
  SparseTreeVector operator()(const OperatorSection& op, std::span<const double> coeffs) const {
    if (coeffs.size() > op.dimension()) {
      throw std::invalid_argument("apply: more coefficients than columns");
    }
    SparseTreeVector out;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
      if (coeffs[n] == 0.0) continue;
      for (const auto& [node, value] : op.columns()[n].entries()) out.add(node, coeffs[n] * value);
    }
    return out;
  }
} apply{};

struct IsometryReport {
  double lhs;  // ||a||_p
  double rhs;  // ||H(S)(sum a_k e_{n_k})||
  bool pass;
};

// Places a_k at n_k = chi(sigma|k), k = 1..len(a), where sigma runs through
// `prefix` and continues with entries 1 beyond it.
inline IsometryReport branch_isometry_check(const FiniteTree& tree, const Node& prefix,
                                            std::span<const double> coeffs, const Exponents& e) {
  std::vector<Node::value_type> entries(prefix.entries().begin(), prefix.entries().end());
  if (entries.size() < coeffs.size()) entries.resize(coeffs.size(), 1);
  const Node sigma(std::move(entries));

  // Only the columns n_k of H(S) are touched; the section up to max n_k can
  // be far too large to materialize.
  SparseTreeVector image;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const Node t = sigma.prefix(k);
    if (!tree.contains(t)) throw std::invalid_argument("branch_isometry_check: branch leaves S");
    const std::uint64_t index = chi_encode(t);
    if (index > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw std::overflow_error("branch_isometry_check: column index exceeds 63 bits");
    }
    const auto n = static_cast<std::int64_t>(index);
    image += coeffs[k - 1] * hs_column(tree, n);
  }
  const double lhs = lp_norm(e.p(), coeffs);
  const double rhs = znorm(e, image);
  return {lhs, rhs, std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, lhs)};
}

// A finite block sequence (y_1, ..., y_L) with a declared norm bound. Block
// means the chi-supports are successive intervals; the interval endpoints are
// kept as nodes, which compare in chi order, so that supports deep in the
// tree need no 64-bit chi index.
class BlockSequenceData {
 public:
  struct Interval {
    Node lo;
    Node hi;
  };

  BlockSequenceData() = default;
  BlockSequenceData(std::vector<SparseTreeVector> vectors, const Exponents& e, double bound)
      : vectors_(std::move(vectors)), bound_(bound) {
    std::optional<Node> last;
    for (std::size_t n = 0; n < vectors_.size(); ++n) {
      const SparseTreeVector& y = vectors_[n];
      if (y.is_zero()) {
        intervals_.push_back(std::nullopt);
        continue;
      }
      Interval iv{y.entries().begin()->first, y.entries().rbegin()->first};
      if (last && !(*last < iv.lo)) {
        throw std::invalid_argument("BlockSequenceData: supports are not successive blocks (vector " +
                                    std::to_string(n + 1) + ")");
      }
      last = iv.hi;
      intervals_.push_back(std::move(iv));
      if (znorm(e, y) > bound) {
        throw std::invalid_argument("BlockSequenceData: vector " + std::to_string(n + 1) +
                                    " exceeds the declared bound");
      }
    }
  }

  std::size_t size() const { return vectors_.size(); }
  // 1-based
  const SparseTreeVector& at(std::size_t n) const { return vectors_.at(n - 1); }
  const std::vector<SparseTreeVector>& vectors() const { return vectors_; }
  const std::optional<Interval>& interval(std::size_t n) const { return intervals_.at(n - 1); }
  double bound() const { return bound_; }

 private:
  std::vector<SparseTreeVector> vectors_;
  std::vector<std::optional<Interval>> intervals_;
  double bound_ = 0.0;
};

namespace detail {

// ||P_sigma(y_n)|| for every maximal chain sigma of the joint support closure.
// A branch of the whole tree meets the closure in an initial part of one of
// these chains, and the projections only see support nodes, so the maximal
// chains carry every branch projection up to domination.
struct BranchProjections {
  std::vector<std::vector<Node>> chains;
  std::vector<std::map<std::size_t, double>> values;  // chain -> (n -> norm), n 1-based

  BranchProjections(const BlockSequenceData& data, const Exponents& e) {
    std::map<Node, std::size_t> owner;
    NodeSet support;
    for (std::size_t n = 1; n <= data.size(); ++n) {
      for (const auto& [node, value] : data.at(n).entries()) {
        owner.emplace(node, n);
        support.insert(node);
      }
    }
    if (support.empty()) return;
    chains = maximal_chains(FiniteTree(closure(support)));
    for (const auto& chain : chains) {
      std::map<std::size_t, double> mass;
      for (const Node& t : chain) {
        auto it = owner.find(t);
        if (it != owner.end()) mass[it->second] += pmass(data.at(it->second).at(t), e.p());
      }
      for (auto& [n, m] : mass) m = std::pow(m, 1.0 / e.p());
      values.push_back(std::move(mass));
    }
  }
};

}  // namespace detail

struct SparsityWitness {
  std::size_t k;
  std::vector<Node> chain;
  std::vector<std::size_t> indices;  // positions n >= k with projection >= 2^-k
};

struct SparsityResult {
  bool pass;
  std::optional<SparsityWitness> witness;
};

namespace detail {

// Checks |{j >= k : v_j >= 2^-k}| <= 1 along every chain for the subsequence
// `selected` (data indices), renumbered 1..m.
inline std::optional<SparsityWitness> sparsity_violation(const BranchProjections& proj,
                                                         const std::vector<std::size_t>& selected) {
  for (std::size_t c = 0; c < proj.chains.size(); ++c) {
    for (std::size_t k = 1; k <= selected.size(); ++k) {
      const double threshold = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 2000)));
      std::vector<std::size_t> hits;
      for (std::size_t j = k; j <= selected.size(); ++j) {
        auto it = proj.values[c].find(selected[j - 1]);
        if (it != proj.values[c].end() && it->second >= threshold) hits.push_back(j);
      }
      if (hits.size() > 1) return SparsityWitness{k, proj.chains[c], hits};
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline SparsityResult sparsity_check(const BlockSequenceData& data, const Exponents& e) {
  const detail::BranchProjections proj(data, e);
  std::vector<std::size_t> all(data.size());
  for (std::size_t n = 0; n < all.size(); ++n) all[n] = n + 1;
  auto w = detail::sparsity_violation(proj, all);
  return {!w.has_value(), std::move(w)};
}

struct GreedySelection {
  std::vector<std::size_t> indices;  // 1-based, increasing
  bool shortfall;                    // fewer than target_len found
};

// Left-to-right scan keeping a vector iff the kept subsequence stays
// asymptotically sparse.
inline GreedySelection greedy_sparse_subsequence(const BlockSequenceData& data, const Exponents& e,
                                                 std::size_t target_len) {
  if (target_len > data.size()) {
    throw std::invalid_argument("greedy_sparse_subsequence: target longer than the data");
  }
  GreedySelection out{{}, false};
  if (target_len == 0) return out;
  const detail::BranchProjections proj(data, e);
  for (std::size_t n = 1; n <= data.size() && out.indices.size() < target_len; ++n) {
    out.indices.push_back(n);
    if (detail::sparsity_violation(proj, out.indices)) out.indices.pop_back();
  }
  out.shortfall = out.indices.size() < target_len;
  return out;
}

}  // namespace ssrank
