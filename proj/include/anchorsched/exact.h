#ifndef ANCHORSCHED_EXACT_H_
#define ANCHORSCHED_EXACT_H_

// Polynomial special cases: sets with a greatest element (box), unit
// 1-disruption with zero processing times, and 1-disruption on critical
// graphs, plus the routing that picks the strongest applicable solver.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "anchorsched/anchored.h"
#include "anchorsched/common.h"
#include "anchorsched/formulations.h"
#include "anchorsched/graph.h"
#include "anchorsched/milp.h"
#include "anchorsched/uncertainty.h"

namespace anchorsched {

inline double NominalMakespan(const PrecedenceGraph& g) {
  return EarliestSchedule(g).makespan();
}

// Earliest schedule under the largest deviation, capped by the latest nominal
// schedule with makespan M; a job is anchored iff its earliest worst-case
// start does not exceed its latest start.
inline AnchoredSolution SolveBox(const Instance& inst) {
  const PrecedenceGraph& g = inst.graph;
  const std::optional<JobVector> dhat =
      GreatestElement(inst.uncertainty, g.num_jobs());
  if (!dhat.has_value()) {
    Fail(ErrorCode::kUnsupportedUncertainty,
         "set has no greatest element; box solver does not apply");
  }
  const Schedule latest = LatestSchedule(g, inst.deadline);
  const std::vector<double> w = g.VertexWeights(*dhat);
  const Schedule earliest = EarliestSchedule(g, w);
  AnchoredSolution sol;
  sol.schedule.start.resize(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    sol.schedule.start[v] = std::min(earliest.start[v], latest.start[v]);
    if (g.IsJob(v) && earliest.start[v] <= latest.start[v] + kEps) {
      sol.anchored.push_back(v);
    }
  }
  sol.objective = AnchoredWeight(inst, sol.anchored);
  return sol;
}

namespace internal {

inline bool AllZeroProcessing(const PrecedenceGraph& g) {
  for (Vertex v = 1; v <= g.num_jobs(); ++v) {
    if (g.processing(v) != 0.0) return false;
  }
  return true;
}

}  // namespace internal

// Zero processing times, one job deviating by 1: the LP relaxation of Dom
// has integral vertices, so a vertex optimum is an optimal anchored set.
// The deadline is floored first.
inline AnchoredSolution SolveUAnchRob(const Instance& inst) {
  const std::optional<double> dhat0 = OneDisruptionDeviation(inst.uncertainty);
  if (!internal::AllZeroProcessing(inst.graph) || !dhat0.has_value() ||
      *dhat0 != 1.0) {
    Fail(ErrorCode::kUnsupportedInstance,
         "needs zero processing times and unit 1-disruption");
  }
  Instance unit = inst;
  unit.deadline = std::floor(inst.deadline + kEps);
  const PathMatrices paths = ComputePathMatrices(unit);
  const FormulationModel fm = BuildDom(unit, paths);
  const SolveResult lp = SolveLp(fm.model);
  if (lp.status != SolveStatus::kOptimal) {
    Fail(ErrorCode::kDeadlineInfeasible, "Dom relaxation is infeasible");
  }
  for (int id : fm.anchor_vars) {
    const double v = lp.incumbent[id];
    if (std::abs(v - std::round(v)) > 1e-6) {
      Fail(ErrorCode::kNonIntegralVertex,
           "LP vertex has fractional anchoring value " + std::to_string(v));
    }
  }
  AnchoredSolution sol;
  sol.anchored = AnchoredFromValues(fm, lp.incumbent);
  sol.objective = AnchoredWeight(inst, sol.anchored);
  sol.schedule = DominantSchedule(unit, paths.worst, sol.anchored);
  return sol;
}

// Rounds M down to L0(s,t) + dhat0 * k for the largest integer k; the optimum
// does not change.
inline double TightenDeadline(const Instance& inst) {
  const std::optional<double> dhat0 = OneDisruptionDeviation(inst.uncertainty);
  if (!dhat0.has_value()) {
    Fail(ErrorCode::kUnsupportedUncertainty, "needs a 1-disruption set");
  }
  const double l0 = NominalMakespan(inst.graph);
  if (inst.deadline < l0 - kEps) {
    Fail(ErrorCode::kDeadlineInfeasible, "deadline below the minimum makespan");
  }
  if (*dhat0 <= 0.0) return inst.deadline;
  const double steps = std::floor((inst.deadline - l0) / *dhat0 + 1e-9);
  return l0 + *dhat0 * std::max(0.0, steps);
}

// 1-disruption on a critical graph reduces to U-AnchRob on the same poset
// with deadline (M - L0(s,t)) / dhat0; schedules map back through
// z = z_ref + dhat0 * z', z_ref the earliest nominal schedule.
inline AnchoredSolution SolveCriticalOneDisruption(const Instance& inst) {
  const std::optional<double> dhat0 = OneDisruptionDeviation(inst.uncertainty);
  if (!dhat0.has_value()) {
    Fail(ErrorCode::kUnsupportedUncertainty, "needs a 1-disruption set");
  }
  const PrecedenceGraph& g = inst.graph;
  if (!IsCritical(g)) Fail(ErrorCode::kNotCritical, "graph is not critical");
  if (*dhat0 <= 0.0) {
    Instance box = inst;
    box.uncertainty = BoxSet{JobVector(g.num_jobs(), 0.0)};
    return SolveBox(box);
  }
  const double tightened = TightenDeadline(inst);
  const Schedule reference = EarliestSchedule(g);

  Instance unit = inst;
  unit.graph = g.WithProcessing(JobVector(g.num_jobs(), 0.0));
  unit.uncertainty = OneDisruptionSet{1.0};
  unit.deadline =
      std::round((tightened - reference.makespan()) / *dhat0);
  const AnchoredSolution reduced = SolveUAnchRob(unit);

  AnchoredSolution sol;
  sol.anchored = reduced.anchored;
  sol.objective = AnchoredWeight(inst, sol.anchored);
  sol.schedule.start.resize(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    sol.schedule.start[v] = reference.start[v] + *dhat0 * reduced.schedule.start[v];
  }
  return sol;
}

enum class ExactRoute { kBox, kCriticalOneDisruption, kUAnchRob, kDomMip };

inline std::string_view ExactRouteName(ExactRoute r) {
  switch (r) {
    case ExactRoute::kBox: return "box";
    case ExactRoute::kCriticalOneDisruption: return "critical_one_disruption";
    case ExactRoute::kUAnchRob: return "u_anchrob";
    case ExactRoute::kDomMip: return "dom";
  }
  return "unknown";
}

// Strongest applicable solver: greatest element, then 1-disruption on a
// critical graph, then unit 1-disruption with zero times, else the Dom MIP.
inline ExactRoute ChooseRoute(const Instance& inst) {
  if (GreatestElement(inst.uncertainty, inst.num_jobs()).has_value()) {
    return ExactRoute::kBox;
  }
  const std::optional<double> dhat0 = OneDisruptionDeviation(inst.uncertainty);
  if (dhat0.has_value() && IsCritical(inst.graph)) {
    return ExactRoute::kCriticalOneDisruption;
  }
  if (dhat0.has_value() && *dhat0 == 1.0 &&
      internal::AllZeroProcessing(inst.graph)) {
    return ExactRoute::kUAnchRob;
  }
  return ExactRoute::kDomMip;
}

struct AutoResult {
  ExactRoute route = ExactRoute::kDomMip;
  FormulationResult result;
};

inline AutoResult SolveAuto(const Instance& inst,
                            const FormulationSolveOptions& options = {}) {
  AutoResult out;
  out.route = ChooseRoute(inst);
  if (out.route == ExactRoute::kDomMip) {
    const PathMatrices paths = ComputePathMatrices(inst);
    out.result = SolveFormulation(inst, paths, Formulation::kDom, options);
    return out;
  }
  const auto start = std::chrono::steady_clock::now();
  AnchoredSolution sol;
  switch (out.route) {
    case ExactRoute::kBox: sol = SolveBox(inst); break;
    case ExactRoute::kCriticalOneDisruption:
      sol = SolveCriticalOneDisruption(inst);
      break;
    default: sol = SolveUAnchRob(inst); break;
  }
  SolveResult& r = out.result.mip;
  r.status = SolveStatus::kOptimal;
  r.primal_value = r.dual_bound = sol.objective;
  r.gap = 0.0;
  r.runtime_seconds = internal::Elapsed(start);
  out.result.solution = std::move(sol);
  return out;
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_EXACT_H_
