#pragma once

// The strict-singularity construction: choice of N, the recursive selection
// of (k_i, eps_i, F_i), the S_2 witness (F, a_n) and its verification.
//
// Block sizes grow like 2^(2p i), so at the larger parameter points nothing
// indexed by n can be stored explicitly. Rounds keep F_i as an interval and
// the data enters through BlockSource, which answers the few aggregate
// questions the selection and the checks need.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrank/logreal.hpp"
#include "ssrank/node.hpp"
#include "ssrank/operators.hpp"
#include "ssrank/schreier.hpp"
#include "ssrank/tree.hpp"
#include "ssrank/zpq.hpp"

namespace ssrank {

class ConstructionParams {
 public:
  ConstructionParams(double p, double delta, double theta) : p_(p), delta_(delta), theta_(theta) {
    if (!(std::isfinite(p) && p >= 1)) throw std::invalid_argument("ConstructionParams: p must be >= 1");
    if (!(std::isfinite(delta) && delta > 0)) {
      throw std::invalid_argument("ConstructionParams: delta must be > 0");
    }
    if (!(std::isfinite(theta) && theta >= 1)) {
      throw std::invalid_argument("ConstructionParams: theta must be >= 1");
    }
  }
  double p() const { return p_; }
  double q() const { return 2 * p_; }
  double delta() const { return delta_; }
  double theta() const { return theta_; }
  Exponents exps() const { return Exponents(p(), q()); }

 private:
  double p_;
  double delta_;
  double theta_;
};

namespace detail {

// Rounding noise of long double arithmetic; the inputs of choose_N are
// decimal user input and get the coarser kInputTie.
constexpr LogReal::Float kTie = 64 * std::numeric_limits<LogReal::Float>::epsilon();
constexpr LogReal::Float kInputTie = 1e-12L;

inline LogReal::Float tie_slack(LogReal::Float t, LogReal::Float rel = kTie) {
  return rel * std::fmax(1.0L, std::fabs(t));
}

// Least integer c >= floor_value with log2(c) >= t, ties resolved in favour
// of the smaller integer.
inline Count least_with_log2(LogReal::Float t, std::uint64_t floor_value, LogReal::Float rel = kTie) {
  if (!(t >= 61)) {
    std::uint64_t c = t <= 0 ? 1 : static_cast<std::uint64_t>(std::ceil(std::exp2(t)));
    while (c > 1 && std::log2(static_cast<LogReal::Float>(c - 1)) >= t - tie_slack(t, rel)) --c;
    while (std::log2(static_cast<LogReal::Float>(c)) < t - tie_slack(t, rel)) ++c;
    return Count::of(std::max(c, floor_value));
  }
  return max(Count::from_log2(t), Count::of(floor_value));
}

}  // namespace detail

// Least N >= 2 with N^{1/q - 1/p} <= delta / (2 theta).
inline std::uint64_t choose_N(const ConstructionParams& params) {
  const LogReal::Float t =
      params.q() * std::log2(2.0L * params.theta() / static_cast<LogReal::Float>(params.delta()));
  if (t > 60) throw std::overflow_error("choose_N: N exceeds 2^60");
  return detail::least_with_log2(t, 2, detail::kInputTie).exact();
}

// Read access to a block sequence (y_n), n >= 1.
class BlockSource {
 public:
  virtual ~BlockSource() = default;

  virtual std::string name() const = 0;
  // nullopt for sequences without end
  virtual std::optional<Count> length() const = 0;
  // sum of |supp(y_n)| for n in [first, first + count)
  virtual Count support_sum(const Count& first, const Count& count) const = 0;
  // Least l with |{n >= l : ||P_sigma(y_n)|| >= eps}| <= 1 for every branch sigma.
  virtual Count sparsity_start(LogReal eps) const = 0;
  // Every y_n lives below its own depth-1 node and the root carries nothing,
  // so vectors with different n have incomparable supports.
  virtual bool separated() const = 0;
  // Aggregates over [first, first + count); only required when separated().
  virtual LogReal norm_q_sum(const Count& first, const Count& count) const = 0;
  virtual LogReal max_segment(const Count& first, const Count& count) const = 0;
  virtual LogReal max_norm(const Count& first, const Count& count) const = 0;
  virtual SparseTreeVector vector(std::uint64_t n) const = 0;
};

// y_n is a fixed pattern rooted at the depth-1 node (1 + (n-1) G), where G
// exceeds the largest grade in the pattern, so the blocks follow chi order.
class AnchoredFamily final : public BlockSource {
 public:
  AnchoredFamily(std::string name, SparseTreeVector pattern, const Exponents& e)
      : name_(std::move(name)), pattern_(std::move(pattern)), q_(e.q()) {
    for (const auto& [node, value] : pattern_.entries()) gap_ = std::max(gap_, node.grade() + 1);
    norm_ = LogReal::of(znorm(e, pattern_));
    if (!pattern_.is_zero()) segment_ = LogReal::of(max_segment_projection(e, pattern_).value);
    for (const auto& [node, value] : pattern_.entries()) {
      max_abs_ = std::max(max_abs_, std::fabs(value));
    }
  }

  std::string name() const override { return name_; }
  std::optional<Count> length() const override { return std::nullopt; }
  Count support_sum(const Count& first, const Count& count) const override {
    (void)first;
    if (pattern_.is_zero()) return Count{};
    const Count size = Count::of(pattern_.support_size());
    if (count.is_exact() && count.exact() < (Count::kExactLimit >> 8)) {
      return Count::of(count.exact() * pattern_.support_size());
    }
    return Count::from_log2(count.log2() + size.log2());
  }
  Count sparsity_start(LogReal) const override { return Count::of(1); }
  bool separated() const override { return true; }
  LogReal norm_q_sum(const Count&, const Count& count) const override {
    return count.real() * norm_.pow(q_);
  }
  LogReal max_segment(const Count&, const Count& count) const override {
    return count.real().is_zero() ? LogReal::zero() : segment_;
  }
  LogReal max_norm(const Count&, const Count& count) const override {
    return count.real().is_zero() ? LogReal::zero() : norm_;
  }
  SparseTreeVector vector(std::uint64_t n) const override {
    if (n < 1) throw std::out_of_range("AnchoredFamily: index must be >= 1");
    if ((n - 1) > (std::numeric_limits<std::uint64_t>::max() - 1) / gap_) {
      throw std::overflow_error("AnchoredFamily: anchor exceeds 64 bits");
    }
    const std::uint64_t anchor = 1 + (n - 1) * gap_;
    SparseTreeVector y;
    for (const auto& [node, value] : pattern_.entries()) {
      std::vector<Node::value_type> entries{anchor};
      entries.insert(entries.end(), node.entries().begin(), node.entries().end());
      y.set(Node(std::move(entries)), value);
    }
    return y;
  }

  const SparseTreeVector& pattern() const { return pattern_; }

 private:
  std::string name_;
  SparseTreeVector pattern_;
  double q_;
  std::uint64_t gap_ = 1;
  LogReal norm_;
  LogReal segment_;
  double max_abs_ = 0.0;
};

// y_n takes the value m_n^{-1/q} on m_n = b^n consecutive depth-1 nodes.
class GeometricAntichain final : public BlockSource {
 public:
  GeometricAntichain(std::uint64_t base, const Exponents& e) : base_(base), q_(e.q()) {
    if (base < 2) throw std::invalid_argument("GeometricAntichain: base must be >= 2");
  }

  std::string name() const override { return "antichain(" + std::to_string(base_) + "^n)"; }
  std::optional<Count> length() const override { return std::nullopt; }
  // b^first (b^count - 1) / (b - 1)
  Count support_sum(const Count& first, const Count& count) const override {
    const LogReal::Float lb = std::log2(static_cast<LogReal::Float>(base_));
    const LogReal::Float f = first.real().value();
    const LogReal::Float c = count.real().value();
    const LogReal::Float tail =
        c * lb < 64 ? std::log2(std::exp2(c * lb) - 1) : c * lb;
    const LogReal::Float lg = f * lb + tail - std::log2(static_cast<LogReal::Float>(base_ - 1));
    if (lg < 61 && first.is_exact() && count.is_exact()) {
      std::uint64_t sum = 0;
      std::uint64_t term = 1;
      for (std::uint64_t i = 0; i < first.exact(); ++i) term *= base_;
      for (std::uint64_t i = 0; i < count.exact(); ++i, term *= base_) sum += term;
      return Count::of(sum);
    }
    return Count::from_log2(lg);
  }
  Count sparsity_start(LogReal) const override { return Count::of(1); }
  bool separated() const override { return true; }
  LogReal norm_q_sum(const Count&, const Count& count) const override { return count.real(); }
  LogReal max_segment(const Count& first, const Count&) const override {
    return LogReal::from_log2(-first.real().value() * std::log2(static_cast<LogReal::Float>(base_)) / q_);
  }
  LogReal max_norm(const Count&, const Count& count) const override {
    return count.real().is_zero() ? LogReal::zero() : LogReal::one();
  }
  SparseTreeVector vector(std::uint64_t n) const override {
    if (n < 1) throw std::out_of_range("GeometricAntichain: index must be >= 1");
    const LogReal::Float lg = static_cast<LogReal::Float>(n) * std::log2(static_cast<LogReal::Float>(base_));
    if (lg > 20 && !guard_override()) {
      throw std::length_error("GeometricAntichain: more than 2^20 support nodes");
    }
    std::uint64_t offset = 0;
    std::uint64_t m = 1;
    for (std::uint64_t j = 1; j < n; ++j) {
      m *= base_;
      offset += m;
    }
    m *= base_;
    const double value = std::pow(static_cast<double>(m), -1.0 / q_);
    SparseTreeVector y;
    for (std::uint64_t j = 1; j <= m; ++j) y.set(Node{offset + j}, value);
    return y;
  }

 private:
  std::uint64_t base_;
  double q_;
};

// A stored finite block sequence.
class MaterializedSource final : public BlockSource {
 public:
  MaterializedSource(BlockSequenceData data, const Exponents& e) : data_(std::move(data)) {
    const detail::BranchProjections proj(data_, e);
    for (const auto& values : proj.values) {
      std::vector<std::pair<std::size_t, double>> chain(values.begin(), values.end());
      chains_.push_back(std::move(chain));
    }
    prefix_.push_back(0);
    for (const auto& y : data_.vectors()) prefix_.push_back(prefix_.back() + y.support_size());
  }

  std::string name() const override { return "data"; }
  std::optional<Count> length() const override { return Count::of(data_.size()); }
  Count support_sum(const Count& first, const Count& count) const override {
    const std::uint64_t a = first.exact() - 1;
    const std::uint64_t b = a + count.exact();
    if (b > data_.size()) throw std::out_of_range("MaterializedSource: range beyond the data");
    return Count::of(prefix_[b] - prefix_[a]);
  }
  Count sparsity_start(LogReal eps) const override {
    std::uint64_t l = 1;
    for (const auto& chain : chains_) {
      std::vector<std::size_t> hits;
      for (const auto& [n, value] : chain) {
        if (LogReal::of(value) >= eps) hits.push_back(n);
      }
      if (hits.size() > 1) l = std::max<std::uint64_t>(l, hits[hits.size() - 2] + 1);
    }
    return Count::of(l);
  }
  bool separated() const override { return false; }
  LogReal norm_q_sum(const Count&, const Count&) const override { return unsupported(); }
  LogReal max_segment(const Count&, const Count&) const override { return unsupported(); }
  LogReal max_norm(const Count&, const Count&) const override { return unsupported(); }
  SparseTreeVector vector(std::uint64_t n) const override { return data_.at(n); }

  const BlockSequenceData& data() const { return data_; }

 private:
  [[noreturn]] static LogReal unsupported() {
    throw std::logic_error("MaterializedSource: aggregates need separated supports");
  }

  BlockSequenceData data_;
  std::vector<std::vector<std::pair<std::size_t, double>>> chains_;
  std::vector<std::uint64_t> prefix_;
};

enum class FamilyKind { antichain, comb };

// Pattern of the comb family: a chain below the root plus sibling leaves,
// scaled to norm 2u with u in [1/2, 1].
inline SparseTreeVector comb_pattern(const Exponents& e, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  SparseTreeVector t;
  const std::uint64_t chain = 1 + rng() % 3;
  const std::uint64_t leaves = 1 + rng() % 3;
  std::vector<Node::value_type> path;
  for (std::uint64_t j = 0; j < chain; ++j) {
    t.set(Node(path), (rng() & 1 ? 1 : -1) * (0.25 + 0.75 * unit()));
    path.push_back(1);
  }
  for (std::uint64_t j = 0; j < leaves; ++j) {
    t.set(Node{2 + j}, (rng() & 1 ? 1 : -1) * (0.25 + 0.75 * unit()));
  }
  const double u = 0.5 + 0.5 * unit();
  return (2 * u / znorm(e, t)) * t;
}

// width_base 1 gives y_n = e_(n); larger bases give the geometric antichain.
inline std::unique_ptr<BlockSource> make_family(FamilyKind kind, const Exponents& e, std::uint64_t seed,
                                                std::uint64_t width_base = 1) {
  if (kind == FamilyKind::comb) return std::make_unique<AnchoredFamily>("comb", comb_pattern(e, seed), e);
  if (width_base == 1) return std::make_unique<AnchoredFamily>("antichain", unit_vector(Node{}), e);
  return std::make_unique<GeometricAntichain>(width_base, e);
}

inline BlockSequenceData synth_family(FamilyKind kind, const ConstructionParams& params, std::size_t n_max,
                                      std::uint64_t seed, std::uint64_t width_base = 1) {
  if (n_max < 1) throw std::invalid_argument("synth_family: n_max must be >= 1");
  const auto source = make_family(kind, params.exps(), seed, width_base);
  std::vector<SparseTreeVector> vectors;
  for (std::size_t n = 1; n <= n_max; ++n) vectors.push_back(source->vector(n));
  return BlockSequenceData(std::move(vectors), params.exps(), 2.0);
}

struct Round {
  Count k;
  std::int64_t eps_log2;  // eps_i = 2^eps_log2
  Count start;            // F_i = [start, start + k - 1]
  LogReal mu;
  Count l;  // sparsity start used for this round

  LogReal eps() const { return LogReal::pow2(static_cast<LogReal::Float>(eps_log2)); }
  Count end() const { return start.plus(k).minus(1); }
};

struct Selection {
  std::uint64_t N = 0;
  std::vector<Round> rounds;
};

class SelectionError : public std::runtime_error {
 public:
  SelectionError(const std::string& what, std::optional<Count> required_length, std::vector<Round> partial)
      : std::runtime_error(what), required_length_(required_length), partial_(std::move(partial)) {}
  // data length a finite source would need to complete the current round
  const std::optional<Count>& required_length() const { return required_length_; }
  const std::vector<Round>& partial() const { return partial_; }

 private:
  std::optional<Count> required_length_;
  std::vector<Round> partial_;
};

namespace detail {

inline constexpr LogReal::Float kMagnitudeLimit = 1e15L;

inline bool manageable(LogReal::Float lg) {
  return lg == -std::numeric_limits<LogReal::Float>::infinity() ||
         (std::isfinite(lg) && std::fabs(lg) <= kMagnitudeLimit);
}

}  // namespace detail

inline Selection select(const ConstructionParams& params, const BlockSource& source) {
  Selection sel;
  sel.N = choose_N(params);
  const double p = params.p();
  const double q = params.q();
  LogReal mu = LogReal::one();
  std::optional<Count> prev_end;
  const auto fail = [&](const std::string& what, std::optional<Count> need = std::nullopt) {
    throw SelectionError("select: round " + std::to_string(sel.rounds.size() + 1) + ": " + what, need,
                         sel.rounds);
  };
  for (std::uint64_t i = 1; i <= sel.N; ++i) {
    const auto fi = static_cast<LogReal::Float>(i);
    // 2 k^{-1/p} <= 2^{-1} mu^{-1} 2^{-i}
    const LogReal::Float t = p * (fi + 2 + mu.log2());
    if (!detail::manageable(t)) fail("block size beyond representable magnitude");
    const Count k = detail::least_with_log2(t, sel.N);
    // k^{1-1/p} eps <= 2^{-1} mu^{-1} 2^{-i}
    const LogReal::Float x = -1 - fi - mu.log2() - (1 - 1.0L / p) * k.log2();
    const LogReal::Float e = std::fmin(std::floor(x + detail::tie_slack(x)), 2.0L);
    Round r{k, static_cast<std::int64_t>(e), Count{}, mu, Count{}};
    r.l = source.sparsity_start(r.eps());
    Count start = max(k, r.l);
    if (prev_end) start = max(start, prev_end->plus(Count::of(1)));
    if (i == 1) start = max(start, Count::of(sel.N));
    r.start = start;
    if (!detail::manageable(r.start.log2())) fail("block position beyond representable magnitude");
    const Count end = r.end();
    if (auto len = source.length(); len && end > *len) fail("data exhausted", end);
    const Count supp = source.support_sum(r.start, r.k);
    if (!detail::manageable(supp.log2())) fail("support size beyond representable magnitude");
    sel.rounds.push_back(r);
    prev_end = end;
    mu = (i == 1 ? LogReal::zero() : mu) + supp.real().pow(1.0L / q);
  }
  return sel;
}

struct ConditionReport {
  bool c1 = true;
  bool c2 = true;
  bool c3 = true;
  bool c4 = true;
  bool mu = true;
  std::vector<std::string> failures;

  bool pass() const { return c1 && c2 && c3 && c4 && mu; }
};

// Rechecks (C1)-(C4) and the mu recursion from the data alone.
inline ConditionReport validate_selection(const Selection& sel, const ConstructionParams& params,
                                          const BlockSource& source) {
  ConditionReport out;
  const auto flag = [&](bool& cond, std::size_t i, const std::string& what) {
    cond = false;
    out.failures.push_back("round " + std::to_string(i) + ": " + what);
  };
  if (sel.rounds.size() != sel.N) flag(out.c1, 0, "number of rounds differs from N");
  const double p = params.p();
  const double q = params.q();
  LogReal mu_sum = LogReal::zero();
  for (std::size_t i = 1; i <= sel.rounds.size(); ++i) {
    const Round& r = sel.rounds[i - 1];
    const LogReal mu = i == 1 ? LogReal::one() : mu_sum;
    if (!leq_rel(mu, r.mu, 1e-12L) || !leq_rel(r.mu, mu, 1e-12L)) flag(out.mu, i, "mu differs");
    if (i == 1 && r.start < Count::of(sel.N)) flag(out.c1, i, "min F_1 < N");
    if (i > 1) {
      const Count prev = sel.rounds[i - 2].end();
      const bool after = r.start.is_exact() && prev.is_exact() ? r.start > prev : r.start >= prev;
      if (!after) flag(out.c1, i, "F_i does not follow F_{i-1}");
    }
    if (r.k < Count::of(1) || r.k > r.start) flag(out.c2, i, "k_i > min F_i");

    if (!source.separated()) {
      const std::uint64_t first = r.start.exact();
      const std::uint64_t last = r.end().exact();
      NodeSet support;
      std::vector<SparseTreeVector> ys;
      for (std::uint64_t n = first; n <= last; ++n) {
        ys.push_back(source.vector(n));
        for (const auto& [t, v] : ys.back().entries()) support.insert(t);
      }
      if (!support.empty()) {
        for (const auto& chain : maximal_chains(FiniteTree(closure(support)))) {
          std::size_t hits = 0;
          for (const auto& y : ys) {
            hits += LogReal::of(chain_projection_norm(params.exps(), chain, y)) >= r.eps();
          }
          if (hits > 1) {
            flag(out.c3, i, "branch meets two large projections");
            break;
          }
        }
      }
    }

    const LogReal lhs = (r.k.real() * r.eps() + LogReal::of(2)) * r.k.real().pow(-1.0L / p);
    if (!mu.is_zero()) {
      const LogReal rhs = mu.inverse() * LogReal::pow2(-static_cast<LogReal::Float>(i));
      if (!leq_rel(lhs, rhs, 1e-9L)) flag(out.c4, i, "(k eps + 2) k^{-1/p} exceeds the bound");
    }
    mu_sum += source.support_sum(r.start, r.k).real().pow(1.0L / q);
  }
  return out;
}

struct WitnessRun {
  Count first;
  Count count;
  LogReal a;  // N^{-1/p} k_i^{-1/p}
};

struct Witness {
  std::vector<WitnessRun> runs;
};

inline Witness build_witness(const Selection& sel, const ConstructionParams& params) {
  Witness w;
  const LogReal n_part = LogReal::of(static_cast<LogReal::Float>(sel.N)).pow(-1.0L / params.p());
  for (const Round& r : sel.rounds) w.runs.push_back({r.start, r.k, n_part * r.k.real().pow(-1.0L / params.p())});
  return w;
}

inline std::map<std::uint64_t, double> expand(const Witness& w, std::uint64_t limit = 1u << 20) {
  std::map<std::uint64_t, double> out;
  for (const WitnessRun& run : w.runs) {
    if (!run.first.is_exact() || !run.count.is_exact() || out.size() + run.count.exact() > limit) {
      throw std::length_error("expand: witness exceeds the size limit");
    }
    for (std::uint64_t j = 0; j < run.count.exact(); ++j) out[run.first.exact() + j] = run.a.to_double();
  }
  return out;
}

// F in S_2 via the block decomposition: each run lies in S_1 and there are at
// most min F runs.
inline bool s2_by_blocks(const Witness& w) {
  if (w.runs.empty()) return true;
  if (Count::of(w.runs.size()) > w.runs.front().first) return false;
  for (std::size_t i = 0; i < w.runs.size(); ++i) {
    const WitnessRun& r = w.runs[i];
    if (r.count > r.first) return false;
    if (i > 0) {
      const Count prev = w.runs[i - 1].first.plus(w.runs[i - 1].count).minus(1);
      if (r.first.is_exact() && prev.is_exact() ? !(r.first > prev) : r.first < prev) return false;
    }
  }
  return true;
}

struct BoundCheck {
  LogReal value;
  LogReal bound;  // infinite bound: log2 = +inf
  bool pass;
};

inline BoundCheck bound_check(LogReal value, LogReal bound) {
  return {value, bound, std::isinf(bound.log2()) && bound.log2() > 0 ? true : leq_rel(value, bound, 1e-9L)};
}

struct ConstructionReport {
  ConstructionParams params;
  std::string family;
  Selection selection;
  Witness witness;
  ConditionReport conditions;
  bool s2 = false;
  double lp_norm = 0.0;
  bool lp_pass = false;
  std::vector<BoundCheck> z_norms;
  std::vector<BoundCheck> seg_bounds;
  std::vector<BoundCheck> partition_sums;
  BoundCheck aggregate{};
  BoundCheck final_y_norm{};
  LogReal max_y_norm;  // over n in F
  bool p3 = true;      // max_y_norm <= 2
  std::string route;

  bool pass() const {
    const auto all = [](const std::vector<BoundCheck>& v) {
      return std::all_of(v.begin(), v.end(), [](const BoundCheck& c) { return c.pass; });
    };
    return conditions.pass() && s2 && lp_pass && all(z_norms) && all(seg_bounds) && aggregate.pass &&
           final_y_norm.pass;
  }
};

enum class VerifyRoute { automatic, materialized };

namespace detail {

struct RoundNorms {
  LogReal z_norm;
  LogReal segment;
  LogReal max_y;
  SparseTreeVector z;
};

// z_i = k_i^{-1/p} sum_{n in F_i} y_n, stored explicitly.
inline RoundNorms materialize_round(const Round& r, const ConstructionParams& params,
                                    const BlockSource& source) {
  RoundNorms out;
  const double c = r.k.real().pow(-1.0L / params.p()).to_double();
  for (std::uint64_t n = r.start.exact(); n <= r.end().exact(); ++n) {
    const SparseTreeVector y = source.vector(n);
    out.max_y = std::max(out.max_y, LogReal::of(znorm(params.exps(), y)));
    for (const auto& [t, v] : y.entries()) out.z.add(t, c * v);
  }
  out.z_norm = LogReal::of(znorm(params.exps(), out.z));
  if (!out.z.is_zero()) out.segment = LogReal::of(max_segment_projection(params.exps(), out.z).value);
  return out;
}

}  // namespace detail

inline ConstructionReport verify(const Selection& sel, const BlockSource& source, const ConstructionParams& params,
                                 VerifyRoute route = VerifyRoute::automatic) {
  ConstructionReport rep{params, source.name(), sel, build_witness(sel, params), {}, false, 0.0, false, {},
                         {},     {},            {}, {},                           {}, true, ""};
  rep.conditions = validate_selection(sel, params, source);
  const double p = params.p();
  const double q = params.q();
  const LogReal theta = LogReal::of(params.theta());
  const auto N = static_cast<LogReal::Float>(sel.N);

  rep.s2 = s2_by_blocks(rep.witness);
  std::uint64_t total = 0;
  bool small = true;
  for (const Round& r : sel.rounds) {
    small = small && r.k.is_exact() && r.start.is_exact() && r.k.exact() <= (1u << 16);
    if (small) total += r.k.exact();
  }
  small = small && total <= (1u << 16);
  if (small) {
    IntSet f;
    for (const auto& [n, a] : expand(rep.witness)) f.push_back(n);
    rep.s2 = rep.s2 && schreier_member(SchreierIndex(2), f);
  }

  // sum over F of a_n^p = sum_i k_i a_i^p
  {
    long double sum = 0.0L;
    long double carry = 0.0L;
    for (const WitnessRun& run : rep.witness.runs) {
      const long double term = (run.count.real() * run.a.pow(p)).value() - carry;
      const long double next = sum + term;
      carry = (next - sum) - term;
      sum = next;
    }
    rep.lp_norm = static_cast<double>(std::pow(sum, 1.0L / p));
    rep.lp_pass = std::fabs(rep.lp_norm - 1.0) <= 1e-12;
  }

  const bool symbolic = route == VerifyRoute::automatic && source.separated();
  rep.route = symbolic ? "separated" : "materialized";
  if (!symbolic && !small) throw std::length_error("verify: selection too large to materialize");

  std::vector<detail::RoundNorms> norms(sel.rounds.size());
  if (symbolic) {
    for (std::size_t i = 0; i < sel.rounds.size(); ++i) {
      const Round& r = sel.rounds[i];
      const LogReal scale = r.k.real().pow(-1.0L / p);
      norms[i].z_norm = scale * source.norm_q_sum(r.start, r.k).pow(1.0L / q);
      norms[i].segment = scale * source.max_segment(r.start, r.k);
      norms[i].max_y = source.max_norm(r.start, r.k);
    }
  } else {
    std::vector<std::future<detail::RoundNorms>> jobs;
    for (const Round& r : sel.rounds) {
      jobs.push_back(std::async(std::launch::async, detail::materialize_round, std::cref(r), std::cref(params),
                                std::cref(source)));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) norms[i] = jobs[i].get();
  }

  LogReal z_q;
  for (std::size_t i = 0; i < sel.rounds.size(); ++i) {
    const Round& r = sel.rounds[i];
    const auto fi = static_cast<LogReal::Float>(i + 1);
    rep.z_norms.push_back(bound_check(norms[i].z_norm, theta));
    const LogReal seg_bound = r.mu.is_zero() ? LogReal::from_log2(std::numeric_limits<LogReal::Float>::infinity())
                                             : r.mu.inverse() * LogReal::pow2(-fi);
    rep.seg_bounds.push_back(bound_check(norms[i].segment, seg_bound));
    rep.max_y_norm = std::max(rep.max_y_norm, norms[i].max_y);
    z_q += norms[i].z_norm.pow(q);
  }

  LogReal z_norm;
  std::vector<LogReal> partition(sel.rounds.size());
  if (symbolic) {
    z_norm = z_q.pow(1.0L / q);
    // the attaining family splits along the depth-1 subtrees, and those of
    // round i meet supp(z_i) only
    for (std::size_t i = 0; i < sel.rounds.size(); ++i) partition[i] = norms[i].z_norm.pow(q);
  } else {
    SparseTreeVector z;
    for (const auto& rn : norms) z += rn.z;
    z_norm = LogReal::of(znorm(params.exps(), z));
    for (const SegmentMass& s : optimal_segment_family(params.exps(), z)) {
      for (std::size_t i = 0; i < norms.size(); ++i) {
        const auto& entries = norms[i].z.entries();
        const bool touches = std::any_of(s.segment.nodes().begin(), s.segment.nodes().end(),
                                         [&](const Node& t) { return entries.contains(t); });
        if (touches) {
          partition[i] += LogReal::of(s.mass).pow(q);
          break;
        }
      }
    }
  }
  const LogReal half_q = LogReal::pow2(q - 1);
  for (std::size_t i = 0; i < sel.rounds.size(); ++i) {
    const LogReal bound = half_q * (theta.pow(q) + LogReal::pow2(-static_cast<LogReal::Float>(i + 1)));
    rep.partition_sums.push_back(bound_check(partition[i], bound));
  }

  rep.aggregate = bound_check(z_norm, LogReal::of(N).pow(1.0L / q) * LogReal::of(2) * theta);
  rep.final_y_norm = bound_check(LogReal::of(N).pow(-1.0L / p) * z_norm, LogReal::of(params.delta()));
  rep.p3 = rep.max_y_norm <= LogReal::of(2);
  return rep;
}

// select + verify in one step
inline ConstructionReport construct(const ConstructionParams& params, const BlockSource& source,
                                    VerifyRoute route = VerifyRoute::automatic) {
  return verify(select(params, source), source, params, route);
}

}  // namespace ssrank
