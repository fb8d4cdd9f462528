#pragma once

// Reference implementations for the Schreier families.

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "ssrank/schreier.hpp"

namespace ssrank::testing_support {

// Definitional membership: search every split of F into consecutive
// nonempty blocks.
inline bool member_by_witness(int xi, const IntSet& f) {
  if (f.empty()) return true;
  if (xi == 1) return f.size() <= f.front();
  const std::function<bool(std::size_t, std::uint64_t)> split = [&](std::size_t from,
                                                                   std::uint64_t budget) {
    if (from == f.size()) return true;
    if (budget == 0) return false;
    for (std::size_t to = from + 1; to <= f.size(); ++to) {
      const IntSet block(f.begin() + static_cast<std::ptrdiff_t>(from),
                         f.begin() + static_cast<std::ptrdiff_t>(to));
      if (member_by_witness(xi - 1, block) && split(to, budget - 1)) return true;
    }
    return false;
  };
  return split(0, f.front());
}

inline std::vector<IntSet> all_subsets(int m) {
  std::vector<IntSet> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    IntSet s;
    for (int j = 0; j < m; ++j) {
      if (mask >> j & 1) s.push_back(static_cast<std::uint64_t>(j + 1));
    }
    out.push_back(s);
  }
  return out;
}

// Longest chain of the family as a tree under end-extension.
inline std::size_t longest_chain(const FiniteFamily& fam, const IntSet& from) {
  std::size_t best = 1;
  const std::uint64_t start = from.empty() ? 1 : from.back() + 1;
  for (std::uint64_t v = start; v <= static_cast<std::uint64_t>(fam.universe()); ++v) {
    IntSet next = from;
    next.push_back(v);
    if (fam.contains(next)) best = std::max(best, 1 + longest_chain(fam, next));
  }
  return best;
}

inline IntSet random_increasing(std::mt19937_64& rng, std::size_t len, std::uint64_t top) {
  IntSet pool(top);
  for (std::uint64_t i = 0; i < top; ++i) pool[i] = i + 1;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(len);
  return make_set(pool);
}

}  // namespace ssrank::testing_support
