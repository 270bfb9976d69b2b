// Solves a small instance end to end: worst-case paths, the exact route, the
// dominance MIP and a check of the returned schedule.
//
//   anchor_demo [instance.json]

#include <cstdio>
#include <string>

#include "anchorsched/exact.h"
#include "anchorsched/formulations.h"
#include "anchorsched/instance_io.h"

int main(int argc, char** argv) {
  using namespace anchorsched;
  const std::string path =
      argc > 1 ? argv[1] : std::string(ANCHORSCHED_DATA_DIR) + "/fig1_budgeted.json";
  try {
    const Instance inst = ReadInstance(path);
    const PathMatrices paths = ComputePathMatrices(inst);
    const PrecedenceGraph& g = inst.graph;
    std::printf("%s: %d jobs, %s uncertainty, deadline %g\n", inst.meta.label.c_str(),
                g.num_jobs(), std::string(UncertaintyTypeName(inst.uncertainty)).c_str(),
                inst.deadline);
    std::printf("longest s-t path: nominal %g, worst case %g\n",
                paths.nominal(g.source(), g.sink()), paths.worst(g.source(), g.sink()));

    const AutoResult exact = SolveAuto(inst);
    std::printf("route %s\n", std::string(ExactRouteName(exact.route)).c_str());
    const FormulationResult dom = SolveFormulation(inst, paths, Formulation::kDom);
    if (!exact.result.solution || !dom.solution) {
      std::printf("no anchored schedule meets the deadline\n");
      return 2;
    }
    const AnchoredSolution& sol = *exact.result.solution;
    std::printf("anchored weight %g (dom MIP %g, LP bound %g)\n", sol.objective,
                dom.solution->objective, LpBound(inst, paths, Formulation::kDom));
    std::printf("anchored jobs:");
    for (int j : sol.anchored) std::printf(" %d", j);
    std::printf("\nbaseline starts:");
    for (Vertex v = 1; v <= g.num_jobs(); ++v) std::printf(" %g", sol.schedule.start[v]);
    std::printf("\nfeasible: %s\n", IsFeasibleSolution(inst, paths.worst, sol) ? "yes" : "no");
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
