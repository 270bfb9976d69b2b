// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "anchorsched/commands.h"
#include "anchorsched/exact.h"
#include "anchorsched/formulations.h"
#include "anchorsched/instances.h"
#include "oracles.h"

namespace anchorsched {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed check; the first message is kept for the report.
  void Check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << "first failure: " << what << "; ";
    pass = false;
  }
};

Instance FromData(const std::string& name) { return ReadInstance(oracle::DataPath(name)); }

bool HasLayered(oracle::SetVariant v) {
  return v == oracle::SetVariant::kBudgeted || v == oracle::SetVariant::kOneDisruption;
}

// Whether the layered shifts dominate every worst-case excess over nominal.
bool DominanceOverLayeredHolds(const Instance& inst, const PathMatrices& paths) {
  const PrecedenceGraph& g = inst.graph;
  const std::vector<double> shift = LayeredShifts(g, LayeredBudget(inst).dhat);
  for (Vertex j = 1; j <= g.num_jobs(); ++j) {
    for (Vertex i = 0; i <= g.num_jobs(); ++i) {
      if (g.Precedes(i, j) && shift[j] < paths.worst(i, j) - paths.nominal(i, j) - 1e-9) {
        return false;
      }
    }
  }
  return true;
}

// The random instances shared by the oracle and relaxation-ordering checks.
std::vector<std::pair<oracle::SetVariant, Instance>> OracleInstances() {
  std::vector<std::pair<oracle::SetVariant, Instance>> out;
  for (oracle::SetVariant v : oracle::kAllVariants) {
    for (int k = 0; k < 50; ++k) {
      Rng rng(MixSeed(20000 + static_cast<int>(v), static_cast<uint64_t>(k)));
      out.emplace_back(v, oracle::RandomInstance(rng, v));
    }
  }
  return out;
}

void WorkedExamples(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  const Schedule x{{0, 0, 1, 1, 3, 2.5, 4.5}};

  const Instance box = FromData("fig1.json");
  const LongestPathMatrix box_worst = WorstCaseLongestPaths(box.graph, box.uncertainty);
  out.Check(IsXAnchored(box.graph, box_worst, x, std::vector<int>{1, 2, 4}),
            "H={1,2,4} x-anchored under the box set");

  const Instance budgeted = FromData("fig1_budgeted.json");
  const LongestPathMatrix bud_worst =
      WorstCaseLongestPaths(budgeted.graph, budgeted.uncertainty);
  out.Check(IsXAnchored(budgeted.graph, bud_worst, x, std::vector<int>{1, 2, 4, 5}),
            "H={1,2,4,5} x-anchored under the budget of one");

  const Instance chain = FromData("fig4.json");
  const PathMatrices paths = ComputePathMatrices(chain);
  const double tol = 1e-9;
  out.Check(std::abs(paths.nominal(0, 3) - 2.0) <= tol, "nominal s-3 path is 2");
  out.Check(std::abs(paths.worst(0, 3) - 3.0) <= tol, "worst-case s-3 path is 3");
  out.Check(std::abs(paths.nominal(3, 4) - 1.0) <= tol, "nominal 3-t path is 1");
  const std::vector<double> shift = LayeredShifts(chain.graph, LayeredBudget(chain).dhat);
  out.Check(shift.size() == 5 && std::abs(shift[1]) <= tol &&
                std::abs(shift[2] - 1.0) <= tol && std::abs(shift[3] - 2.0) <= tol,
            "layered shifts are (0,1,2)");
  const std::vector<double> h = {1.0, 0.0, 0.5};
  out.Check(InProjection(chain, paths, h, Formulation::kLay, tol),
            "h=(1,0,1/2) lies in the layered projection");
  // Row of the chain (s,3,t): L0(s,3) + (L(s,3) - L0(s,3)) h_3 + L0(3,t) <= M.
  const double chain_row = paths.nominal(0, 3) +
                           (paths.worst(0, 3) - paths.nominal(0, 3)) * h[2] +
                           paths.nominal(3, 4);
  out.Check(std::abs(chain_row - chain.deadline - 0.5) <= tol,
            "chain (s,3,t) violated by 0.5 under the dominance model");
  const std::optional<ChainCut> cut = SeparateChain(chain, paths, h, Formulation::kDom, tol);
  out.Check(cut.has_value() && cut->chain == std::vector<Vertex>{0, 3, 4} &&
                std::abs(cut->violation - 0.5) <= tol,
            "separation returns chain (s,3,t) with violation 0.5");

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.Check(seconds < 1.0, "worked examples run under 1 s");
  out.detail << "runtime " << seconds << " s";
}

void OracleEquivalence(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  int solves = 0;
  for (const auto& [variant, inst] : OracleInstances()) {
    const PathMatrices paths = ComputePathMatrices(inst);
    const double expected = BruteForceOptimum(inst, paths.worst).objective;
    std::vector<Formulation> kinds = {Formulation::kStd, Formulation::kDom};
    if (HasLayered(variant)) kinds.push_back(Formulation::kLay);
    for (Formulation f : kinds) {
      const FormulationResult r = SolveFormulation(inst, paths, f);
      ++solves;
      const bool ok = r.solution.has_value() && r.solution->objective == expected;
      out.Check(ok, std::string(FormulationName(f)) + " on " + inst.meta.label +
                        " expected " + std::to_string(expected));
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.detail << solves << " MIP solves on 300 instances, runtime " << seconds << " s";
}

void WorstCasePaths(Outcome& out) {
  double max_error = 0.0;
  int pairs = 0;
  oracle::RandomInstanceOptions o;
  o.min_jobs = 3;
  o.max_jobs = 8;
  for (int k = 0; k < 200; ++k) {
    const oracle::SetVariant v = oracle::kAllVariants[k % 6];
    Rng rng(MixSeed(30000, static_cast<uint64_t>(k)));
    const Instance inst = oracle::RandomInstance(rng, v, o);
    const PrecedenceGraph& g = inst.graph;
    const LongestPathMatrix worst = WorstCaseLongestPaths(g, inst.uncertainty);
    const std::vector<JobVector> patterns =
        oracle::DeviationPatterns(inst.uncertainty, g.num_jobs());
    for (Vertex i = 0; i < g.num_vertices(); ++i) {
      for (Vertex j = 0; j < g.num_vertices(); ++j) {
        if (i == j) continue;
        const std::optional<double> ref = oracle::WorstCaseByEnumeration(g, patterns, i, j);
        if (!ref.has_value()) {
          out.Check(!worst.Defined(i, j), "unreachable pair reported reachable");
          continue;
        }
        ++pairs;
        const double error = worst.Defined(i, j) ? std::abs(worst(i, j) - *ref) : INFINITY;
        max_error = std::max(max_error, error);
      }
    }
  }
  out.Check(max_error <= 1e-9, "max error " + std::to_string(max_error));
  out.detail << pairs << " reachable pairs, max error " << max_error;
}

void Dominance(Outcome& out) {
  int checked = 0;
  int attempt = 0;
  double worst_slack = INFINITY;
  while (checked < 500) {
    const oracle::SetVariant v = oracle::kAllVariants[attempt % 6];
    Rng rng(MixSeed(40000, static_cast<uint64_t>(attempt++)));
    const Instance inst = oracle::RandomInstance(rng, v);
    const PathMatrices paths = ComputePathMatrices(inst);
    const int n = inst.num_jobs();
    std::vector<int> h;
    for (int j = 1; j <= n; ++j) {
      if (rng.Bernoulli(0.6)) h.push_back(j);
    }
    // Drop random jobs until the set is anchored; the empty set always is.
    while (!IsAnchoredSet(inst, paths.worst, h)) {
      h.erase(h.begin() + oracle::Draw(rng, 0, static_cast<int>(h.size()) - 1));
    }
    const Schedule z = DominantSchedule(inst, paths.worst, h);
    for (int j : h) {
      for (Vertex i = 0; i <= n; ++i) {
        if (!inst.graph.Precedes(i, j)) continue;
        worst_slack = std::min(worst_slack, z.start[j] - z.start[i] - paths.worst(i, j));
      }
    }
    out.Check(z.makespan() <= inst.deadline + kEps, "dominant schedule misses the deadline");
    ++checked;
  }
  out.Check(worst_slack >= -kEps, "slack " + std::to_string(worst_slack));
  out.detail << checked << " pairs, minimum slack " << worst_slack;
}

void BoxSets(Outcome& out) {
  oracle::RandomInstanceOptions o;
  o.max_jobs = 12;
  for (int k = 0; k < 100; ++k) {
    Rng rng(MixSeed(50000, static_cast<uint64_t>(k)));
    const Instance inst = oracle::RandomInstance(rng, oracle::SetVariant::kBox, o);
    const PathMatrices paths = ComputePathMatrices(inst);
    const AnchoredSolution sol = SolveBox(inst);
    out.Check(sol.objective == BruteForceOptimum(inst, paths.worst).objective &&
                  IsFeasibleSolution(inst, paths.worst, sol),
              "box instance " + std::to_string(k));
  }
  const double fig1 = SolveBox(FromData("fig1.json")).objective;
  out.Check(fig1 == 4.0, "unit-weight example gives " + std::to_string(fig1));
  out.detail << "100 random instances, example objective " << fig1;
}

void UnitIntegrality(Outcome& out) {
  int max_n = 0;
  for (int k = 0; k < 30; ++k) {
    Rng rng(MixSeed(60000, static_cast<uint64_t>(k)));
    const int n = oracle::Draw(rng, 5, 30);
    max_n = std::max(max_n, n);
    Instance inst;
    inst.graph =
        oracle::RandomGraph(rng, n, 0.1 + 0.3 * rng.UniformReal(), JobVector(n, 0.0));
    inst.uncertainty = OneDisruptionSet{1.0};
    inst.weights = oracle::RandomVector(rng, n, 1, 5);
    const double depth =
        WorstCaseLongestPaths(inst.graph, inst.uncertainty)(0, inst.graph.sink());
    inst.deadline = oracle::Draw(rng, 0, static_cast<int>(depth));
    const PathMatrices paths = ComputePathMatrices(inst);
    const SolveResult lp = SolveLp(BuildDom(inst, paths).model);
    bool integral = lp.status == SolveStatus::kOptimal;
    for (double v : lp.incumbent) integral = integral && std::abs(v - std::round(v)) <= 1e-6;
    out.Check(integral, "fractional vertex on instance " + std::to_string(k));
    try {
      const AnchoredSolution sol = SolveUAnchRob(inst);
      out.Check(IsFeasibleSolution(inst, paths.worst, sol),
                "infeasible solution on instance " + std::to_string(k));
    } catch (const Error& e) {
      out.Check(false, std::string(ErrorCodeName(e.code())) + " on instance " +
                           std::to_string(k));
    }
  }
  out.detail << "30 instances, n up to " << max_n;
}

void CriticalOneDisruption(Outcome& out) {
  for (int k = 0; k < 30; ++k) {
    const Instance inst =
        GenerateInstance("SP_pQCri_dUnif_G1", 8 + k % 13, static_cast<uint64_t>(k));
    out.Check(IsCritical(inst.graph), "generated graph not critical");
    const PathMatrices paths = ComputePathMatrices(inst);
    const AnchoredSolution sol = SolveCriticalOneDisruption(inst);
    const FormulationResult dom = SolveFormulation(inst, paths, Formulation::kDom);
    out.Check(dom.solution.has_value() && dom.solution->objective == sol.objective,
              "seed " + std::to_string(k));
  }
  out.detail << "30 instances, n from 8 to 20";
}

void GeneratorCriticality(Outcome& out) {
  int critical = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = GenerateInstance("SP_pQCri_dUnif_G1", 40, seed);
    if (IsCritical(inst.graph)) ++critical;
  }
  out.Check(critical == 100, "critical count");
  out.detail << critical << "/100 critical";
}

void RelaxationOrdering(Outcome& out) {
  int premise = 0;
  int total = 0;
  for (const auto& [variant, inst] : OracleInstances()) {
    const PathMatrices paths = ComputePathMatrices(inst);
    const double dom = LpBound(inst, paths, Formulation::kDom);
    const double std_bound = LpBound(inst, paths, Formulation::kStd);
    ++total;
    out.Check(dom <= std_bound + 1e-6, inst.meta.label + " dom above std");
    if (HasLayered(variant) && DominanceOverLayeredHolds(inst, paths)) {
      ++premise;
      out.Check(dom <= LpBound(inst, paths, Formulation::kLay) + 1e-6,
                inst.meta.label + " dom above lay");
    }
  }
  out.detail << total << " instances, " << premise << " with the layered premise";
}

void ScaledTables(Outcome& out) {
  const char* labels[] = {"ER_pZero_dUnif_G1", "ER_pQCri_dUnif_G1", "SP_pZero_dUnif_G1",
                          "SP_pQCri_dUnif_G1"};
  for (const char* label : labels) {
    const bool characterized = std::string(label) != "ER_pQCri_dUnif_G1";
    int solved = 0;
    double dom_gap = 0.0;
    double lay_gap = 0.0;
    double seconds = 0.0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const Instance inst = GenerateInstance(label, 40, seed);
      const PathMatrices paths = ComputePathMatrices(inst);
      FormulationSolveOptions so;
      so.params.time_limit_seconds = 60.0;
      const FormulationResult r = SolveFormulation(inst, paths, Formulation::kDom, so);
      seconds = std::max(seconds, r.mip.runtime_seconds);
      if (r.mip.status != SolveStatus::kOptimal || !r.solution.has_value()) continue;
      ++solved;
      const double opt = r.solution->objective;
      dom_gap += LpGap(LpBound(inst, paths, Formulation::kDom), opt) / 10.0;
      lay_gap += LpGap(LpBound(inst, paths, Formulation::kLay), opt) / 10.0;
    }
    out.Check(solved == 10, std::string(label) + " solved " + std::to_string(solved));
    if (characterized) {
      out.Check(std::abs(dom_gap) <= 1e-6,
                std::string(label) + " dom gap " + std::to_string(dom_gap));
    }
    out.Check(lay_gap >= dom_gap - 1e-9, std::string(label) + " lay gap below dom gap");
    out.detail << label << " solved " << solved << "/10 dom_gap " << dom_gap
               << " lay_gap " << lay_gap << " max_s " << seconds << "; ";
  }
}

}  // namespace
}  // namespace anchorsched

int main() {
  using anchorsched::Outcome;
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"worked examples", anchorsched::WorkedExamples},
      {"formulations match brute force", anchorsched::OracleEquivalence},
      {"worst-case paths match enumeration", anchorsched::WorstCasePaths},
      {"dominant schedule", anchorsched::Dominance},
      {"box solver", anchorsched::BoxSets},
      {"unit relaxation integrality", anchorsched::UnitIntegrality},
      {"critical one-disruption solver", anchorsched::CriticalOneDisruption},
      {"series-parallel generator criticality", anchorsched::GeneratorCriticality},
      {"relaxation ordering", anchorsched::RelaxationOrdering},
      {"scaled benchmark trend", anchorsched::ScaledTables},
  };
  int failures = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome out;
    try {
      criteria[k].second(out);
    } catch (const std::exception& e) {
      out.Check(false, std::string("exception: ") + e.what());
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", out.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
