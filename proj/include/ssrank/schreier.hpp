#pragma once

// Schreier families S_xi for finite xi >= 1 and finite regular families.
//
//   S_1     = { F : |F| <= min F }
//   S_{x+1} = { F_1 u ... u F_n : n <= min F_1, F_1 < ... < F_n, F_i in S_x }
//
// with the empty set a member of every S_xi.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssrank {

using IntSet = std::vector<std::uint64_t>;  // strictly increasing

inline IntSet make_set(IntSet values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (!values.empty() && values.front() == 0) {
    throw std::invalid_argument("integer sets must contain positive integers only");
  }
  return values;
}

// SSRANK_GUARD_OVERRIDE=1 lifts the size guards on exhaustive routines.
inline bool guard_override() {
  const char* v = std::getenv("SSRANK_GUARD_OVERRIDE");
  return v != nullptr && std::string(v) == "1";
}

class SchreierIndex {
 public:
  explicit SchreierIndex(int xi) : xi_(xi) {
    if (xi < 1) throw std::invalid_argument("SchreierIndex: xi must be >= 1");
  }
  int value() const { return xi_; }

 private:
  int xi_;
};

namespace detail {

// reach[i] = last position a single S_xi block starting at position i can
// cover. Blocks of a hereditary family starting at i admit an initial range
// of end positions, and covering a suffix never needs more blocks than
// covering a longer suffix, so jumping to the furthest end is optimal.
inline std::vector<std::size_t> schreier_reach(int xi, std::span<const std::uint64_t> f) {
  const std::size_t n = f.size();
  std::vector<std::size_t> reach(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t room = std::min<std::uint64_t>(f[i], n - i);
    reach[i] = i + static_cast<std::size_t>(room) - 1;
  }
  for (int level = 2; level <= xi; ++level) {
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t pos = i;
      std::size_t end = i;
      for (std::uint64_t blocks = 0; blocks < f[i]; ++blocks) {
        end = reach[pos];
        if (end + 1 == n) break;
        pos = end + 1;
      }
      next[i] = end;
    }
    reach = std::move(next);
  }
  return reach;
}

}  // namespace detail

inline bool schreier_member(SchreierIndex xi, const IntSet& set) {
  const IntSet f = make_set(set);
  if (f.empty()) return true;
  return detail::schreier_reach(xi.value(), f).front() + 1 == f.size();
}

// Symbolic order of the infinite family S_xi.
inline std::string symbolic_order(SchreierIndex xi) { return "w^" + std::to_string(xi.value()); }

// A family of subsets of {1..universe}, universe <= 63, stored as bitmasks
// (bit j-1 set iff j is a member).
class FiniteFamily {
 public:
  using Mask = std::uint64_t;
  static constexpr int kMaxUniverse = 63;

  explicit FiniteFamily(int universe) : universe_(universe) {
    if (universe < 0 || universe > kMaxUniverse) {
      throw std::invalid_argument("FiniteFamily: universe must be in [0, 63]");
    }
  }
  FiniteFamily(int universe, const std::vector<IntSet>& sets) : FiniteFamily(universe) {
    for (const IntSet& s : sets) insert(s);
    normalize();
  }

  static Mask to_mask(const IntSet& s) {
    Mask m = 0;
    for (std::uint64_t v : s) {
      if (v == 0 || v > kMaxUniverse) throw std::out_of_range("FiniteFamily: element out of range");
      m |= Mask{1} << (v - 1);
    }
    return m;
  }
  static IntSet to_set(Mask m) {
    IntSet out;
    while (m) {
      out.push_back(static_cast<std::uint64_t>(std::countr_zero(m)) + 1);
      m &= m - 1;
    }
    return out;
  }

  void insert(const IntSet& s) { insert_mask(to_mask(s)); }
  void insert_mask(Mask m) {
    if (universe_ < kMaxUniverse && (m >> universe_) != 0) {
      throw std::out_of_range("FiniteFamily: set leaves the universe");
    }
    masks_.push_back(m);
    sorted_ = false;
  }
  // Sorts into canonical order (by size, then lexicographically) and adds the
  // empty set.
  void normalize() {
    masks_.push_back(0);
    std::sort(masks_.begin(), masks_.end(), canonical_less);
    masks_.erase(std::unique(masks_.begin(), masks_.end()), masks_.end());
    sorted_ = true;
  }

  int universe() const { return universe_; }
  std::size_t size() const { return masks_.size(); }
  const std::vector<Mask>& masks() const { return masks_; }
  std::vector<IntSet> sets() const {
    std::vector<IntSet> out;
    out.reserve(masks_.size());
    for (Mask m : masks_) out.push_back(to_set(m));
    return out;
  }
  bool contains_mask(Mask m) const {
    if (!sorted_) throw std::logic_error("FiniteFamily: normalize() before lookup");
    return std::binary_search(masks_.begin(), masks_.end(), m, canonical_less);
  }
  bool contains(const IntSet& s) const {
    for (std::uint64_t v : s) {
      if (v == 0 || v > static_cast<std::uint64_t>(universe_)) return false;
    }
    return contains_mask(to_mask(make_set(s)));
  }
  bool includes(const FiniteFamily& other) const {
    return std::all_of(other.masks_.begin(), other.masks_.end(),
                       [&](Mask m) { return contains_mask(m); });
  }

  friend bool operator==(const FiniteFamily& a, const FiniteFamily& b) {
    return a.masks_ == b.masks_;
  }

  static bool canonical_less(Mask a, Mask b) {
    const int pa = std::popcount(a);
    const int pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    if (a == b) return false;
    // the set holding the smallest differing element comes first
    const Mask low = (a ^ b) & ~((a ^ b) - 1);
    return (a & low) != 0;
  }

 private:
  int universe_;
  std::vector<Mask> masks_;
  bool sorted_ = false;
};

// S_xi restricted to subsets of {1..M}.
inline FiniteFamily schreier_restrict(SchreierIndex xi, int max_element) {
  if (max_element < 1) throw std::invalid_argument("schreier_restrict: M must be >= 1");
  const int guard = xi.value() == 1 ? 40 : 25;
  if (max_element > guard && !guard_override()) {
    throw std::length_error("schreier_restrict: M exceeds the size guard of " +
                            std::to_string(guard));
  }
  if (max_element > FiniteFamily::kMaxUniverse) {
    throw std::length_error("schreier_restrict: M exceeds 63");
  }
  FiniteFamily fam(max_element);
  // Depth-first over increasing sequences; a non-member has no member
  // end-extension since the family is hereditary.
  IntSet current;
  const auto visit = [&](auto&& self, std::uint64_t next) -> void {
    for (std::uint64_t v = next; v <= static_cast<std::uint64_t>(max_element); ++v) {
      current.push_back(v);
      if (schreier_member(xi, current)) {
        fam.insert(current);
        self(self, v + 1);
      }
      current.pop_back();
    }
  };
  visit(visit, 1);
  fam.normalize();
  return fam;
}

// F[L] = { F in fam : F subset of L }
inline FiniteFamily family_restrict(const FiniteFamily& fam, const IntSet& subset) {
  const FiniteFamily::Mask lmask = FiniteFamily::to_mask(make_set(subset));
  FiniteFamily out(fam.universe());
  for (FiniteFamily::Mask m : fam.masks()) {
    if ((m & ~lmask) == 0) out.insert_mask(m);
  }
  out.normalize();
  return out;
}

// F(L) = { L(F) : F in fam } with L(F) = { l_i : i in F }.
inline FiniteFamily family_spread_image(const FiniteFamily& fam, const IntSet& increasing) {
  for (std::size_t i = 1; i < increasing.size(); ++i) {
    if (increasing[i] <= increasing[i - 1]) {
      throw std::invalid_argument("family_spread_image: L must be strictly increasing");
    }
  }
  if (!increasing.empty() && increasing.front() == 0) {
    throw std::invalid_argument("family_spread_image: L must be positive");
  }
  int top = 0;
  for (FiniteFamily::Mask m : fam.masks()) top = std::max(top, 64 - std::countl_zero(m));
  if (increasing.size() < static_cast<std::size_t>(top)) {
    throw std::invalid_argument("family_spread_image: L too short");
  }
  const int universe = increasing.empty() ? 0 : static_cast<int>(increasing.back());
  FiniteFamily out(std::max(universe, 0));
  for (FiniteFamily::Mask m : fam.masks()) {
    IntSet image;
    for (std::uint64_t i : FiniteFamily::to_set(m)) image.push_back(increasing[i - 1]);
    out.insert(image);
  }
  out.normalize();
  return out;
}

struct RegularityFlags {
  bool hereditary = false;
  bool spreading = false;
  bool compact = true;  // every finite family is compact
};

inline RegularityFlags is_regular(const FiniteFamily& fam) {
  using Mask = FiniteFamily::Mask;
  RegularityFlags flags{true, true, true};
  for (Mask m : fam.masks()) {
    for (Mask rest = m; rest; rest &= rest - 1) {
      const Mask bit = rest & ~(rest - 1);
      if (!fam.contains_mask(m & ~bit)) flags.hereditary = false;
      // one-step shifts generate every spread within the universe
      const Mask up = bit << 1;
      const bool in_universe = std::countr_zero(bit) + 1 < fam.universe();
      if (in_universe && (m & up) == 0 && !fam.contains_mask((m & ~bit) | up)) {
        flags.spreading = false;
      }
    }
  }
  return flags;
}

// Order of a hereditary family viewed as a tree of increasing enumerations.
inline std::size_t family_order(const FiniteFamily& fam) {
  if (!is_regular(fam).hereditary) {
    throw std::invalid_argument("family_order: family is not hereditary");
  }
  int longest = 0;
  for (FiniteFamily::Mask m : fam.masks()) longest = std::max(longest, std::popcount(m));
  return static_cast<std::size_t>(longest) + 1;
}

// { n_{dk+i-1} : k in F, i in 1..d } with n_j = sequence[j-1].
inline IntSet dilate(const IntSet& set, std::span<const std::uint64_t> sequence, std::uint64_t d,
                     SchreierIndex xi) {
  const IntSet f = make_set(set);
  if (d < 1) throw std::invalid_argument("dilate: d must be >= 1");
  if (f.empty() || !schreier_member(xi, f)) {
    throw std::invalid_argument("dilate: F must be a nonempty member of S_xi");
  }
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    if (sequence[i] <= sequence[i - 1]) {
      throw std::invalid_argument("dilate: N must be strictly increasing");
    }
  }
  if (sequence.size() < d * f.back() + d - 1) throw std::invalid_argument("dilate: N too short");
  IntSet out;
  for (std::uint64_t k : f) {
    for (std::uint64_t i = 1; i <= d; ++i) out.push_back(sequence[d * k + i - 2]);
  }
  out = make_set(out);
  if (!schreier_member(xi, out)) throw std::logic_error("dilate: result left S_xi");
  return out;
}

// Dilation along the identity sequence n_j = j.
inline IntSet dilate(const IntSet& set, std::uint64_t d, SchreierIndex xi) {
  const IntSet f = make_set(set);
  const std::size_t need = f.empty() ? 0 : d * f.back() + d - 1;
  std::vector<std::uint64_t> identity(need);
  std::iota(identity.begin(), identity.end(), std::uint64_t{1});
  return dilate(f, identity, d, xi);
}

}  // namespace ssrank
