#include "anchorsched/exact.h"

#include <gtest/gtest.h>

#include <functional>
#include <vector>

#include "anchorsched/instance_io.h"
#include "anchorsched/instances.h"
#include "oracles.h"

namespace anchorsched {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

Instance FigureOne() { return ReadInstance(oracle::DataPath("fig1.json")); }

Instance Chain(double deadline) {
  Instance inst = ReadInstance(oracle::DataPath("fig4.json"));
  inst.deadline = deadline;
  return inst;
}

// Zero processing times and unit 1-disruption on the given arcs.
Instance ZeroTimes(int n, std::vector<Arc> arcs, double deadline) {
  Instance inst;
  inst.graph = PrecedenceGraph::WithTerminalArcs(n, std::move(arcs), JobVector(n, 0.0));
  inst.uncertainty = OneDisruptionSet{1.0};
  inst.weights = JobVector(n, 1.0);
  inst.deadline = deadline;
  return inst;
}

Instance RandomZeroTimes(Rng& rng, int n) {
  Instance inst;
  inst.graph = oracle::RandomGraph(rng, n, 0.1 + 0.3 * rng.UniformReal(), JobVector(n, 0.0));
  inst.uncertainty = OneDisruptionSet{1.0};
  inst.weights = oracle::RandomVector(rng, n, 1, 5);
  const double depth =
      WorstCaseLongestPaths(inst.graph, inst.uncertainty)(0, inst.graph.sink());
  inst.deadline = static_cast<double>(oracle::Draw(rng, 0, static_cast<int>(depth)));
  return inst;
}

TEST(SolveBoxTest, FigureOne) {
  const Instance inst = FigureOne();
  const AnchoredSolution sol = SolveBox(inst);
  EXPECT_EQ(sol.anchored, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(sol.objective, 4.0);
  EXPECT_TRUE(IsFeasibleSolution(inst, WorstCaseLongestPaths(inst.graph, inst.uncertainty), sol));
}

TEST(SolveBoxTest, LooseDeadlineAnchorsEverything) {
  Instance inst = FigureOne();
  inst.deadline = 5.5;
  EXPECT_EQ(SolveBox(inst).anchored, (std::vector<int>{1, 2, 3, 4, 5}));
  inst.deadline = 4.0;
  inst.uncertainty = BoxSet{JobVector(5, 0.0)};
  EXPECT_EQ(SolveBox(inst).anchored, (std::vector<int>{1, 2, 3, 4, 5}));
}

TEST(SolveBoxTest, Errors) {
  Instance inst = FigureOne();
  inst.deadline = 3.5;
  EXPECT_EQ(CodeOf([&] { SolveBox(inst); }), ErrorCode::kDeadlineInfeasible);
  const Instance budgeted = ReadInstance(oracle::DataPath("fig1_budgeted.json"));
  EXPECT_EQ(CodeOf([&] { SolveBox(budgeted); }), ErrorCode::kUnsupportedUncertainty);
}

TEST(SolveBoxTest, SetsWithGreatestElementAreAccepted) {
  // A scenario list whose first vector dominates the others.
  Instance inst = FigureOne();
  const JobVector dhat = std::get<BoxSet>(inst.uncertainty).dhat;
  inst.uncertainty = ScenarioSet{{dhat, JobVector(5, 0.25)}};
  EXPECT_DOUBLE_EQ(SolveBox(inst).objective, 4.0);
}

TEST(SolveUAnchRobTest, ChainExamples) {
  const std::vector<Arc> chain = {{1, 2}, {2, 3}};
  EXPECT_DOUBLE_EQ(SolveUAnchRob(ZeroTimes(3, chain, 1.0)).objective, 2.0);
  EXPECT_DOUBLE_EQ(SolveUAnchRob(ZeroTimes(3, chain, 0.0)).objective, 1.0);
  EXPECT_DOUBLE_EQ(SolveUAnchRob(ZeroTimes(3, chain, 2.0)).objective, 3.0);
  // Fractional deadlines are floored.
  EXPECT_DOUBLE_EQ(SolveUAnchRob(ZeroTimes(3, chain, 1.9)).objective, 2.0);
}

TEST(SolveUAnchRobTest, ZeroDeadlineKeepsSourceSuccessors) {
  // Jobs 1 and 2 start the poset; 3 follows 1, 4 follows 2 and 3.
  const Instance inst = ZeroTimes(4, {{1, 3}, {2, 4}, {3, 4}}, 0.0);
  EXPECT_EQ(SolveUAnchRob(inst).anchored, (std::vector<int>{1, 2}));
}

TEST(SolveUAnchRobTest, Preconditions) {
  EXPECT_EQ(CodeOf([] { SolveUAnchRob(Chain(3.0)); }), ErrorCode::kUnsupportedInstance);
  Instance two = ZeroTimes(3, {{1, 2}}, 1.0);
  two.uncertainty = OneDisruptionSet{2.0};
  EXPECT_EQ(CodeOf([&] { SolveUAnchRob(two); }), ErrorCode::kUnsupportedInstance);
}

TEST(TightenDeadlineTest, Examples) {
  EXPECT_DOUBLE_EQ(TightenDeadline(Chain(5.7)), 5.0);
  EXPECT_DOUBLE_EQ(TightenDeadline(Chain(4.0)), 4.0);
  Instance half = Chain(4.2);
  half.uncertainty = OneDisruptionSet{0.5};
  EXPECT_DOUBLE_EQ(TightenDeadline(half), 4.0);
  EXPECT_EQ(CodeOf([] { TightenDeadline(Chain(2.0)); }), ErrorCode::kDeadlineInfeasible);
  EXPECT_EQ(CodeOf([] { TightenDeadline(FigureOne()); }),
            ErrorCode::kUnsupportedUncertainty);
}

TEST(SolveCriticalOneDisruptionTest, ChainAtNominalDeadline) {
  const Instance inst = Chain(3.0);
  const AnchoredSolution sol = SolveCriticalOneDisruption(inst);
  EXPECT_EQ(sol.anchored, (std::vector<int>{1}));
  EXPECT_DOUBLE_EQ(sol.objective, 1.0);
  EXPECT_TRUE(IsFeasibleSolution(inst, WorstCaseLongestPaths(inst.graph, inst.uncertainty), sol));
}

TEST(SolveCriticalOneDisruptionTest, ZeroDeviationFallsBackToBox) {
  Instance inst = Chain(3.0);
  inst.uncertainty = OneDisruptionSet{0.0};
  EXPECT_DOUBLE_EQ(SolveCriticalOneDisruption(inst).objective, 3.0);
}

TEST(SolveCriticalOneDisruptionTest, Errors) {
  Instance inst = FigureOne();
  inst.uncertainty = OneDisruptionSet{1.0};
  EXPECT_EQ(CodeOf([&] { SolveCriticalOneDisruption(inst); }), ErrorCode::kNotCritical);
  EXPECT_EQ(CodeOf([] { SolveCriticalOneDisruption(ReadInstance(oracle::DataPath("fig1.json"))); }),
            ErrorCode::kUnsupportedUncertainty);
}

TEST(ChooseRouteTest, Examples) {
  EXPECT_EQ(ChooseRoute(FigureOne()), ExactRoute::kBox);
  EXPECT_EQ(ChooseRoute(Chain(3.0)), ExactRoute::kCriticalOneDisruption);
  EXPECT_EQ(ChooseRoute(ReadInstance(oracle::DataPath("fig1_budgeted.json"))),
            ExactRoute::kDomMip);
  Instance one = FigureOne();
  one.uncertainty = OneDisruptionSet{1.0};
  EXPECT_EQ(ChooseRoute(one), ExactRoute::kDomMip);
}

class RandomExactTest : public testing::TestWithParam<int> {};

TEST_P(RandomExactTest, BoxMatchesBruteForce) {
  Rng rng(MixSeed(5150, static_cast<uint64_t>(GetParam())));
  const Instance inst = oracle::RandomInstance(rng, oracle::SetVariant::kBox);
  const PathMatrices paths = ComputePathMatrices(inst);
  const AnchoredSolution sol = SolveBox(inst);
  EXPECT_DOUBLE_EQ(sol.objective, BruteForceOptimum(inst, paths.worst).objective);
  EXPECT_TRUE(IsFeasibleSolution(inst, paths.worst, sol));
}

TEST_P(RandomExactTest, DeadlineInequalitiesCharacterizeBoxAnchoredSets) {
  Rng rng(MixSeed(6160, static_cast<uint64_t>(GetParam())));
  oracle::RandomInstanceOptions o;
  o.max_jobs = 10;
  const Instance inst = oracle::RandomInstance(rng, oracle::SetVariant::kBox, o);
  const PathMatrices paths = ComputePathMatrices(inst);
  const int n = inst.num_jobs();
  for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask) {
    std::vector<int> h;
    bool allowed = true;
    for (int j = 1; j <= n; ++j) {
      if (!(mask >> (j - 1) & 1u)) continue;
      h.push_back(j);
      const std::optional<int> bound = ChvatalBound(inst, paths, j);
      allowed = allowed && (!bound.has_value() || *bound >= 1);
    }
    ASSERT_EQ(IsAnchoredSet(inst, paths.worst, h), allowed) << "mask " << mask;
  }
}

TEST_P(RandomExactTest, UnitRelaxationVertexIsIntegral) {
  Rng rng(MixSeed(7170, static_cast<uint64_t>(GetParam())));
  const Instance inst = RandomZeroTimes(rng, oracle::Draw(rng, 5, 30));
  const PathMatrices paths = ComputePathMatrices(inst);
  const FormulationModel fm = BuildDom(inst, paths);
  const SolveResult lp = SolveLp(fm.model);
  ASSERT_EQ(lp.status, SolveStatus::kOptimal);
  for (double v : lp.incumbent) EXPECT_NEAR(v, std::round(v), 1e-6);
  const AnchoredSolution sol = SolveUAnchRob(inst);
  EXPECT_NEAR(sol.objective, lp.primal_value, 1e-6);
  EXPECT_TRUE(IsFeasibleSolution(inst, paths.worst, sol));
  if (inst.num_jobs() <= 14) {
    EXPECT_DOUBLE_EQ(sol.objective, BruteForceOptimum(inst, paths.worst).objective);
  }
}

TEST_P(RandomExactTest, CriticalOneDisruptionMatchesDomMip) {
  const Instance inst = GenerateInstance("SP_pQCri_dUnif_G1", 8 + GetParam() % 5,
                                         static_cast<uint64_t>(GetParam()));
  ASSERT_TRUE(IsCritical(inst.graph));
  const PathMatrices paths = ComputePathMatrices(inst);
  const AnchoredSolution sol = SolveCriticalOneDisruption(inst);
  const FormulationResult dom = SolveFormulation(inst, paths, Formulation::kDom);
  ASSERT_TRUE(dom.solution.has_value());
  EXPECT_DOUBLE_EQ(sol.objective, dom.solution->objective);
  EXPECT_DOUBLE_EQ(sol.objective, BruteForceOptimum(inst, paths.worst).objective);
  EXPECT_TRUE(IsFeasibleSolution(inst, paths.worst, sol));
}

TEST_P(RandomExactTest, AutoMatchesBruteForceForEveryVariant) {
  for (oracle::SetVariant v : oracle::kAllVariants) {
    Rng rng(MixSeed(8180 + static_cast<int>(v), static_cast<uint64_t>(GetParam())));
    const Instance inst = oracle::RandomInstance(rng, v);
    const AutoResult r = SolveAuto(inst);
    ASSERT_TRUE(r.result.solution.has_value());
    EXPECT_DOUBLE_EQ(r.result.solution->objective, BruteForceOptimum(inst).objective)
        << oracle::VariantName(v) << " via " << ExactRouteName(r.route);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomExactTest, testing::Range(0, 30));

}  // namespace
}  // namespace anchorsched
