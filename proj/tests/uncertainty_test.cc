#include "anchorsched/uncertainty.h"

#include <gtest/gtest.h>

#include <vector>

#include "oracles.h"

namespace anchorsched {
namespace {

PrecedenceGraph FiveJobGraph() {
  return PrecedenceGraph(
      5, {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 6}, {5, 6}},
      {1, 1, 1, 1, 2});
}

const JobVector kFiveJobDhat = {0.5, 1, 0.5, 0.5, 0.5};

PrecedenceGraph ThreeChain() {
  return PrecedenceGraph(3, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, {1, 1, 1});
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

TEST(WorstCaseLongestPathsTest, ThreeChainBudgeted) {
  const PrecedenceGraph g = ThreeChain();
  const LongestPathMatrix worst = WorstCaseLongestPaths(g, BudgetedSet{{1, 1, 1}, 1});
  const LongestPathMatrix nominal = NominalLongestPaths(g);
  EXPECT_DOUBLE_EQ(worst(0, 3), 3.0);
  EXPECT_DOUBLE_EQ(nominal(0, 3), 2.0);
  EXPECT_DOUBLE_EQ(nominal(3, 4), 1.0);
}

TEST(WorstCaseLongestPathsTest, FiveJobBudgetedGammaOne) {
  const LongestPathMatrix worst =
      WorstCaseLongestPaths(FiveJobGraph(), BudgetedSet{kFiveJobDhat, 1});
  EXPECT_DOUBLE_EQ(worst(0, 6), 4.5);
}

TEST(WorstCaseLongestPathsTest, FullBudgetEqualsBox) {
  const PrecedenceGraph g = FiveJobGraph();
  const LongestPathMatrix box = WorstCaseLongestPaths(g, BoxSet{kFiveJobDhat});
  const LongestPathMatrix full = WorstCaseLongestPaths(g, BudgetedSet{kFiveJobDhat, 5});
  for (Vertex i = 0; i < g.num_vertices(); ++i) {
    for (Vertex j = 0; j < g.num_vertices(); ++j) EXPECT_EQ(box(i, j), full(i, j));
  }
  EXPECT_DOUBLE_EQ(box(0, 5), 3.0);
  EXPECT_DOUBLE_EQ(box(1, 4), 3.0);
}

TEST(WorstCaseLongestPathsTest, Errors) {
  const PrecedenceGraph g = ThreeChain();
  EXPECT_EQ(CodeOf([&] { WorstCaseLongestPaths(g, BudgetedSet{{1, 1, 1}, 4}); }),
            ErrorCode::kBudgetOutOfRange);
  EXPECT_EQ(CodeOf([&] { WorstCaseLongestPaths(g, BudgetedSet{{1, 1, 1}, -1}); }),
            ErrorCode::kBudgetOutOfRange);
  EXPECT_EQ(CodeOf([&] { WorstCaseLongestPaths(g, ScenarioSet{}); }),
            ErrorCode::kEmptyScenarioList);
  EXPECT_EQ(CodeOf([&] { WorstCaseLongestPaths(g, BoxSet{{1, -1, 1}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { WorstCaseLongestPaths(g, BoxSet{{1, 1}}); }),
            ErrorCode::kInvalidArgument);
  // Groups must partition the jobs.
  EXPECT_NE(CodeOf([&] {
              WorstCaseLongestPaths(g, PartitionBudgetedSet{{1, 1, 1}, {{1, 2}}, {1}});
            }),
            ErrorCode::kIoError);
  EXPECT_NE(CodeOf([&] {
              WorstCaseLongestPaths(
                  g, PartitionBudgetedSet{{1, 1, 1}, {{1, 2}, {2, 3}}, {1, 1}});
            }),
            ErrorCode::kIoError);
}

TEST(BudgetedDpTest, ThreeChainTable) {
  const auto table = BudgetedDp(ThreeChain(), JobVector{1, 1, 1}, 1, 0);
  EXPECT_DOUBLE_EQ(table[3][0], 2.0);
  EXPECT_DOUBLE_EQ(table[3][1], 3.0);
}

TEST(BudgetedDpTest, ZeroBudgetIsNominal) {
  const PrecedenceGraph g = FiveJobGraph();
  const auto table = BudgetedDp(g, kFiveJobDhat, 0, 0);
  const Schedule early = EarliestSchedule(g);
  for (Vertex v = 0; v < g.num_vertices(); ++v) EXPECT_EQ(table[v][0], early.start[v]);
}

TEST(BudgetedDpTest, ZeroDeviationIgnoresBudget) {
  const PrecedenceGraph g = FiveJobGraph();
  const auto table = BudgetedDp(g, JobVector(5, 0.0), 3, 0);
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    for (int b = 1; b <= 3; ++b) EXPECT_EQ(table[v][b], table[v][0]);
  }
}

TEST(ExtremePointsTest, Counts) {
  EXPECT_EQ(ExtremePoints(OneDisruptionSet{2.0}, 3).size(), 4u);
  EXPECT_EQ(ExtremePoints(BudgetedSet{JobVector(5, 1.0), 1}, 5).size(), 6u);
  EXPECT_EQ(ExtremePoints(BoxSet{JobVector(4, 1.0)}, 4).size(), 16u);
  const ScenarioSet scenarios{{{1, 0}, {0, 2}}};
  EXPECT_EQ(ExtremePoints(scenarios, 2), scenarios.deltas);
  const PartitionBudgetedSet partition{{1, 1, 1, 1}, {{1, 2}, {3, 4}}, {1, 2}};
  EXPECT_EQ(ExtremePoints(partition, 4).size(), 3u * 4u);
  const MixedBudgetedSet mixed{{{JobVector(3, 2.0), 1}, {JobVector(3, 1.0), 3}}};
  EXPECT_EQ(ExtremePoints(mixed, 3).size(), 4u + 8u);
}

TEST(ExtremePointsTest, Guard) {
  EXPECT_EQ(CodeOf([] { ExtremePoints(BoxSet{JobVector(21, 1.0)}, 21); }),
            ErrorCode::kEnumerationTooLarge);
  EXPECT_EQ(CodeOf([] { ExtremePoints(BudgetedSet{JobVector(10, 1.0), 4}, 10); }),
            ErrorCode::kEnumerationTooLarge);
  EXPECT_EQ(ExtremePoints(BudgetedSet{JobVector(10, 1.0), 10}, 10).size(), 1024u);
}

TEST(ContainsTest, Examples) {
  const JobVector dhat = {1, 2, 3};
  const std::vector<UncertaintySet> sets = {
      BoxSet{dhat},
      BudgetedSet{dhat, 1},
      OneDisruptionSet{1.0},
      PartitionBudgetedSet{dhat, {{1}, {2, 3}}, {1, 1}},
      MixedBudgetedSet{{{dhat, 1}, {{0.5, 0.5, 0.5}, 3}}},
      ScenarioSet{{{1, 0, 0}, {0, 2, 1}}}};
  for (const auto& set : sets) EXPECT_TRUE(Contains(set, JobVector(3, 0.0)));
  EXPECT_TRUE(Contains(BoxSet{dhat}, dhat));
  EXPECT_FALSE(Contains(BudgetedSet{dhat, 1}, JobVector{1, 2, 0}));
  EXPECT_TRUE(Contains(BudgetedSet{dhat, 1}, JobVector{0.5, 1, 0}));
  EXPECT_FALSE(Contains(BudgetedSet{dhat, 1}, JobVector{0.5, 1.5, 0}));
  EXPECT_FALSE(Contains(BoxSet{dhat}, JobVector{1, 2, 3.5}));
  // Convex hull of the mixed components: midpoint of (1,0,0) and (.5,.5,.5).
  EXPECT_TRUE(Contains(sets[4], JobVector{0.75, 0.25, 0.25}));
  EXPECT_FALSE(Contains(sets[4], JobVector{1, 0.5, 0}));
  // Down-monotone hull of the scenarios.
  EXPECT_TRUE(Contains(sets[5], JobVector{0.5, 1, 0.5}));
  EXPECT_FALSE(Contains(sets[5], JobVector{1, 2, 0}));
  EXPECT_FALSE(Contains(sets[0], JobVector{-1, 0, 0}));
}

TEST(GreatestElementTest, Detection) {
  const JobVector dhat = {1, 2, 3};
  EXPECT_EQ(GreatestElement(BoxSet{dhat}, 3), dhat);
  EXPECT_EQ(GreatestElement(BudgetedSet{dhat, 3}, 3), dhat);
  EXPECT_FALSE(GreatestElement(BudgetedSet{dhat, 2}, 3).has_value());
  EXPECT_EQ(GreatestElement(BudgetedSet{{0, 0, 4}, 1}, 3), (JobVector{0, 0, 4}));
  EXPECT_EQ(GreatestElement(ScenarioSet{{{1, 0, 0}, {2, 1, 0}}}, 3), (JobVector{2, 1, 0}));
  EXPECT_EQ(GreatestElement(PartitionBudgetedSet{dhat, {{1}, {2, 3}}, {1, 2}}, 3), dhat);
  EXPECT_EQ(OneDisruptionDeviation(BudgetedSet{JobVector(3, 2.0), 1}), 2.0);
  EXPECT_EQ(OneDisruptionDeviation(OneDisruptionSet{1.5}), 1.5);
  EXPECT_FALSE(OneDisruptionDeviation(BudgetedSet{dhat, 1}).has_value());
}

// Properties over random graphs and sets.

class RandomSetTest : public ::testing::TestWithParam<std::tuple<int, oracle::SetVariant>> {};

TEST_P(RandomSetTest, MatchesEnumerationAndInvariants) {
  const auto [seed, variant] = GetParam();
  Rng rng(MixSeed(2002, static_cast<uint64_t>(seed) * 16 + static_cast<int>(variant)));
  const int n = oracle::Draw(rng, 1, 8);
  const PrecedenceGraph g =
      oracle::RandomGraph(rng, n, 0.3, oracle::RandomVector(rng, n, 0, 4));
  const UncertaintySet set = oracle::RandomSet(rng, n, variant);
  const LongestPathMatrix worst = WorstCaseLongestPaths(g, set);
  const LongestPathMatrix nominal = NominalLongestPaths(g);
  const auto patterns = oracle::DeviationPatterns(set, n);
  for (Vertex i = 0; i < g.num_vertices(); ++i) {
    for (Vertex j = 0; j < g.num_vertices(); ++j) {
      if (i == j) continue;
      const auto expected = oracle::WorstCaseByEnumeration(g, patterns, i, j);
      ASSERT_EQ(worst.Defined(i, j), expected.has_value());
      if (!expected) continue;
      EXPECT_NEAR(worst(i, j), *expected, 1e-9) << i << "," << j;
      EXPECT_GE(worst(i, j), nominal(i, j));
      for (Vertex k = 0; k < g.num_vertices(); ++k) {
        if (nominal.Defined(k, i)) {
          EXPECT_GE(worst(k, j), nominal(k, i) + worst(i, j) - 1e-9);
        }
      }
    }
  }
  // Library enumeration agrees with the pattern scan as a set.
  auto library = ExtremePoints(set, n);
  auto expected = patterns;
  std::sort(library.begin(), library.end());
  std::sort(expected.begin(), expected.end());
  library.erase(std::unique(library.begin(), library.end()), library.end());
  expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
  EXPECT_EQ(library, expected);
  for (const JobVector& d : expected) EXPECT_TRUE(Contains(set, d));
}

INSTANTIATE_TEST_SUITE_P(
    Seeds, RandomSetTest,
    ::testing::Combine(::testing::Range(0, 20), ::testing::ValuesIn(oracle::kAllVariants)));

TEST(BudgetMonotonicityTest, LargerBudgetNeverShortens) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = oracle::Draw(rng, 2, 9);
    const PrecedenceGraph g =
        oracle::RandomGraph(rng, n, 0.3, oracle::RandomVector(rng, n, 0, 4));
    const JobVector dhat = oracle::RandomVector(rng, n, 0, 3);
    LongestPathMatrix prev = WorstCaseLongestPaths(g, BudgetedSet{dhat, 0});
    for (int gamma = 1; gamma <= n; ++gamma) {
      const LongestPathMatrix next = WorstCaseLongestPaths(g, BudgetedSet{dhat, gamma});
      for (Vertex i = 0; i < g.num_vertices(); ++i) {
        for (Vertex j = 0; j < g.num_vertices(); ++j) {
          if (next.Defined(i, j)) {
            EXPECT_GE(next(i, j), prev(i, j));
          }
        }
      }
      prev = next;
    }
  }
}

}  // namespace
}  // namespace anchorsched
