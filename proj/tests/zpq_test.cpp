#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ssrank/zpq.hpp"
#include "properties.hpp"
#include "test_support.hpp"

namespace ssrank {
namespace {

using testing_support::random_vector;

const Exponents kP1Q2(1, 2);

SparseTreeVector fork() { return {{Node{}, 0.1}, {Node{1}, 1.0}, {Node{2}, 1.0}}; }

TEST(Znorm, Examples) {
  EXPECT_NEAR(znorm(kP1Q2, {{Node{1}, 1.0}, {Node{2}, 1.0}}), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(znorm(kP1Q2, {{Node{}, 1.0}, {Node{1}, 1.0}}), 2.0, 1e-12);
  EXPECT_NEAR(znorm(kP1Q2, fork()), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(znorm(Exponents(2, 2), {{Node{}, 1.0}, {Node{1}, 1.0}, {Node{2}, 1.0}}),
              std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(znorm(Exponents(1.5, 3), {{Node{4, 2}, -2.5}}), 2.5, 1e-12);
  EXPECT_EQ(znorm(kP1Q2, {}), 0.0);
  EXPECT_THROW(Exponents(2, 1), std::invalid_argument);
  EXPECT_THROW(Exponents(0.5, 1), std::invalid_argument);
}

TEST(ZnormBruteforce, Examples) {
  EXPECT_NEAR(znorm_bruteforce(kP1Q2, {{Node{1}, 1.0}, {Node{2}, 1.0}}), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(znorm_bruteforce(kP1Q2, {{Node{}, 1.0}, {Node{1}, 1.0}}), 2.0, 1e-12);
  EXPECT_NEAR(znorm_bruteforce(kP1Q2, fork()), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(znorm_bruteforce(kP1Q2, {}), 0.0);
  EXPECT_NEAR(znorm_bruteforce(kP1Q2, {{Node{1}, 3.0}}), 3.0, 1e-12);
  SparseTreeVector wide;
  for (std::uint64_t i = 1; i <= 12; ++i) wide.set(Node{i}, 1.0);
  EXPECT_THROW(znorm_bruteforce(kP1Q2, wide), std::length_error);
}

TEST(Znorm, AgreesWithBruteforce) {
  std::mt19937_64 rng(1);
  const double ps[] = {1.0, 1.5, 2.0};
  for (int trial = 0; trial < 3000; ++trial) {
    const double p = ps[rng() % 3];
    const double q = p + std::uniform_real_distribution<double>(0, 4 - p)(rng);
    const Exponents e(p, q);
    const SparseTreeVector z = random_vector(rng, 1 + rng() % 10);
    const double dp = znorm(e, z);
    ASSERT_NEAR(dp, znorm_bruteforce(e, z), 1e-9 * (1 + dp));
  }
}

TEST(Znorm, OptimalFamilyAttainsNorm) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const Exponents e(1 + (rng() % 3) * 0.5, 4);
    const SparseTreeVector z = random_vector(rng, 1 + rng() % 12);
    const auto family = optimal_segment_family(e, z);
    double total = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
      total += std::pow(family[i].mass, e.q());
      EXPECT_NEAR(family[i].mass, chain_projection_norm(e, family[i].segment.nodes(), z), 1e-12);
      for (std::size_t j = i + 1; j < family.size(); ++j) {
        EXPECT_TRUE(segments_incomparable(family[i].segment, family[j].segment));
      }
    }
    const double norm = znorm(e, z);
    EXPECT_NEAR(std::pow(total, 1 / e.q()), norm, 1e-9 * (1 + norm));
  }
}

TEST(MaxSegmentProjection, Examples) {
  const SegmentProjection f = max_segment_projection(kP1Q2, fork());
  EXPECT_NEAR(f.value, 1.1, 1e-12);
  EXPECT_EQ(f.segment, Segment({Node{}, Node{1}}));
  const SegmentProjection single = max_segment_projection(kP1Q2, {{Node{3, 1}, -4.0}});
  EXPECT_EQ(single.value, 4.0);
  EXPECT_EQ(single.segment, Segment({Node{3, 1}}));
  const SegmentProjection anti = max_segment_projection(kP1Q2, {{Node{1}, 1.0}, {Node{2}, 1.0}});
  EXPECT_EQ(anti.value, 1.0);
  EXPECT_EQ(anti.segment, Segment({Node{1}}));
  EXPECT_THROW(max_segment_projection(kP1Q2, {}), std::invalid_argument);
}

TEST(MaxSegmentProjection, MatchesSegmentEnumeration) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const Exponents e(1 + (rng() % 3) * 0.5, 4);
    const SparseTreeVector z = random_vector(rng, 1 + rng() % 10);
    const NodeSet nodes = closure(z.support());
    double best = 0.0;
    for (const Node& top : nodes) {
      for (const Node& bottom : nodes) {
        if (top.is_prefix_of(bottom)) {
          best = std::max(best, chain_projection_norm(e, Segment::between(top, bottom).nodes(), z));
        }
      }
    }
    const SegmentProjection got = max_segment_projection(e, z);
    EXPECT_NEAR(got.value, best, 1e-12 * (1 + best));
    EXPECT_NEAR(chain_projection_norm(e, got.segment.nodes(), z), got.value, 1e-12 * (1 + best));
  }
}

TEST(Project, Examples) {
  const SparseTreeVector z{{Node{}, 1.0}, {Node{1}, 2.0}};
  EXPECT_EQ(project({Node{1}}, z), (SparseTreeVector{{Node{1}, 2.0}}));
  EXPECT_TRUE(project({}, z).is_zero());
  EXPECT_EQ(project({Node{}, Node{1}, Node{5}}, z), z);
}

TEST(ChainProjectionNorm, Examples) {
  EXPECT_NEAR(chain_projection_norm(kP1Q2, {Node{}, Node{1}}, fork()), 1.1, 1e-12);
  EXPECT_NEAR(chain_projection_norm(Exponents(2, 4), {Node{}, Node{1}},
                                    {{Node{}, 3.0}, {Node{1}, 4.0}}),
              5.0, 1e-12);
  EXPECT_EQ(chain_projection_norm(kP1Q2, {Node{7}}, fork()), 0.0);
  EXPECT_THROW(chain_projection_norm(kP1Q2, {Node{1}, Node{2}}, fork()), std::invalid_argument);
}

TEST(LpNorm, Examples) {
  EXPECT_DOUBLE_EQ(lp_norm(1, std::vector<double>{0.5, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(lp_norm(2, std::vector<double>{3, 4}), 5.0);
  EXPECT_NEAR(lp_norm(1.5, std::vector<double>{1, 1}), std::pow(2.0, 2.0 / 3.0), 1e-15);
  EXPECT_THROW(lp_norm(0.5, std::vector<double>{1}), std::invalid_argument);
}

namespace ts = testing_support;

TEST(ZnormProperties, Homogeneity) {
  std::mt19937_64 rng(21);
  EXPECT_EQ(ts::homogeneity_failures(rng, 1000), 0);
}

TEST(ZnormProperties, TriangleInequality) {
  std::mt19937_64 rng(22);
  EXPECT_EQ(ts::triangle_failures(rng, 1000), 0);
}

TEST(ZnormProperties, SignFlipInvariance) {
  std::mt19937_64 rng(23);
  EXPECT_EQ(ts::sign_flip_failures(rng, 1000), 0);
}

TEST(ZnormProperties, ProjectionContraction) {
  std::mt19937_64 rng(24);
  EXPECT_EQ(ts::contraction_failures(rng, 1000), 0);
}

TEST(ZnormProperties, ChainFormula) {
  std::mt19937_64 rng(25);
  EXPECT_EQ(ts::chain_formula_failures(rng, 1000), 0);
}

TEST(ZnormProperties, BranchIsometry) {
  std::mt19937_64 rng(26);
  EXPECT_EQ(ts::branch_isometry_failures(rng, 1000), 0);
}

TEST(ZnormProperties, IncomparableAdditivity) {
  std::mt19937_64 rng(27);
  EXPECT_EQ(ts::incomparable_additivity_failures(rng, 1000), 0);
}

TEST(ZnormProperties, Domination) {
  std::mt19937_64 rng(28);
  EXPECT_EQ(ts::domination_failures(rng, 1000), 0);
}

}  // namespace
}  // namespace ssrank
