#ifndef ANCHORSCHED_ANCHORED_H_
#define ANCHORSCHED_ANCHORED_H_

// Anchored job sets. A set H is x-anchored when every start time x_j, j in H,
// survives every deviation without being moved; equivalently x is a schedule
// of the graph G plus arcs (i, j), i in H + {s}, j in H, i < j, of length
// L^D(i, j).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchorsched/common.h"
#include "anchorsched/graph.h"
#include "anchorsched/uncertainty.h"

namespace anchorsched {

struct InstanceMeta {
  std::string label;
  uint64_t seed = 0;
  std::string prng;
  std::string notes;
};

struct Instance {
  PrecedenceGraph graph;
  UncertaintySet uncertainty;
  double deadline = 0.0;
  JobVector weights;
  InstanceMeta meta;

  int num_jobs() const { return graph.num_jobs(); }
};

inline void ValidateInstance(const Instance& inst) {
  if (!std::isfinite(inst.deadline) || inst.deadline < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "deadline must be finite and >= 0");
  }
  if (static_cast<int>(inst.weights.size()) != inst.num_jobs()) {
    Fail(ErrorCode::kInvalidArgument, "one weight per job required");
  }
  for (double w : inst.weights) {
    if (!std::isfinite(w) || w < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "weights must be finite and >= 0");
    }
  }
  ValidateUncertainty(inst.uncertainty, inst.num_jobs());
}

// Nominal and worst-case longest path matrices of an instance.
struct PathMatrices {
  LongestPathMatrix nominal;
  LongestPathMatrix worst;
};

inline PathMatrices ComputePathMatrices(const Instance& inst) {
  return {NominalLongestPaths(inst.graph),
          WorstCaseLongestPaths(inst.graph, inst.uncertainty)};
}

struct AnchoredSolution {
  Schedule schedule;
  // Sorted job ids.
  std::vector<int> anchored;
  double objective = 0.0;
};

inline double AnchoredWeight(const Instance& inst, std::span<const int> jobs) {
  double sum = 0.0;
  for (int j : jobs) sum += inst.weights[j - 1];
  return sum;
}

// Vertex-indexed membership mask of a job set.
inline std::vector<char> MembershipMask(const PrecedenceGraph& g,
                                        std::span<const int> jobs) {
  std::vector<char> mask(g.num_vertices(), 0);
  for (int j : jobs) {
    if (!g.IsJob(j)) {
      Fail(ErrorCode::kInvalidArgument,
           "anchored set contains non-job " + std::to_string(j));
    }
    mask[j] = 1;
  }
  return mask;
}

struct WeightedArc {
  Vertex tail = 0;
  Vertex head = 0;
  double length = 0.0;
};

// G plus the anchoring arcs for H. Every arc joins comparable vertices, so
// the topological order of G remains valid.
class AnchoredGraph {
 public:
  AnchoredGraph(const PrecedenceGraph& g, const LongestPathMatrix& worst,
                std::span<const int> anchored)
      : graph_(&g), in_(g.num_vertices()) {
    for (const Arc& a : g.arcs()) {
      in_[a.head].push_back({a.tail, a.head, g.processing(a.tail)});
    }
    const std::vector<char> mask = MembershipMask(g, anchored);
    for (int j : anchored) {
      for (Vertex i = 0; i <= g.num_jobs(); ++i) {
        if ((i == g.source() || mask[i]) && g.Precedes(i, j)) {
          in_[j].push_back({i, j, worst(i, j)});
          extra_.push_back({i, j, worst(i, j)});
        }
      }
    }
  }

  const PrecedenceGraph& graph() const { return *graph_; }
  // Arcs added on top of G.
  std::span<const WeightedArc> extra_arcs() const { return extra_; }
  std::span<const WeightedArc> incoming(Vertex v) const { return in_[v]; }

  Schedule EarliestSchedule() const {
    Schedule z{std::vector<double>(graph_->num_vertices(), 0.0)};
    for (Vertex v : graph_->topological_order()) {
      double t = 0.0;
      for (const WeightedArc& a : in_[v]) t = std::max(t, z.start[a.tail] + a.length);
      z.start[v] = t;
    }
    return z;
  }

 private:
  const PrecedenceGraph* graph_;
  std::vector<std::vector<WeightedArc>> in_;
  std::vector<WeightedArc> extra_;
};

// True iff x_j - x_i >= L^D(i, j) for all i in H + {s}, j in H, i < j.
// Throws NotASchedule when x is not a schedule of G(p).
inline bool IsXAnchored(const PrecedenceGraph& g, const LongestPathMatrix& worst,
                        const Schedule& x, std::span<const int> anchored,
                        double tol = kEps) {
  if (!IsSchedule(g, x, tol)) {
    Fail(ErrorCode::kNotASchedule, "x violates a precedence constraint");
  }
  const std::vector<char> mask = MembershipMask(g, anchored);
  for (int j : anchored) {
    for (Vertex i = 0; i <= g.num_jobs(); ++i) {
      if ((i == g.source() || mask[i]) && g.Precedes(i, j) &&
          x.start[j] - x.start[i] < worst(i, j) - tol) {
        return false;
      }
    }
  }
  return true;
}

// Second-stage check for one realization: is there a schedule of G(p + delta)
// that keeps every job of H at x? Propagates earliest starts with H pinned.
inline bool RecourseFeasible(const PrecedenceGraph& g,
                             std::span<const double> delta, const Schedule& x,
                             std::span<const int> anchored, double tol = kEps) {
  const std::vector<char> mask = MembershipMask(g, anchored);
  const std::vector<double> w = g.VertexWeights(delta);
  std::vector<double> y(g.num_vertices(), 0.0);
  for (Vertex v : g.topological_order()) {
    double t = 0.0;
    for (Vertex u : g.predecessors(v)) t = std::max(t, y[u] + w[u]);
    if (mask[v]) {
      if (t > x.start[v] + tol) return false;
      t = x.start[v];
    }
    y[v] = t;
  }
  return true;
}

inline bool IsAnchoredSet(const Instance& inst, const LongestPathMatrix& worst,
                          std::span<const int> anchored, double tol = kEps) {
  const Schedule z = AnchoredGraph(inst.graph, worst, anchored).EarliestSchedule();
  return z.makespan() <= inst.deadline + tol;
}

// Earliest schedule of the anchored graph. It meets the anchoring conditions
// from every vertex of J + {s}, not only from H + {s}.
inline Schedule DominantSchedule(const Instance& inst,
                                 const LongestPathMatrix& worst,
                                 std::span<const int> anchored,
                                 double tol = kEps) {
  Schedule z = AnchoredGraph(inst.graph, worst, anchored).EarliestSchedule();
  if (z.makespan() > inst.deadline + tol) {
    Fail(ErrorCode::kInfeasibleAnchoredSet,
         "anchored graph needs makespan " + std::to_string(z.makespan()) +
             " > deadline " + std::to_string(inst.deadline));
  }
  return z;
}

inline constexpr int kMaxBruteForceJobs = 20;

// Exhaustive optimum over all job subsets. Among maximum-weight anchored sets
// the lexicographically smallest sorted id list wins.
inline AnchoredSolution BruteForceOptimum(const Instance& inst,
                                          const LongestPathMatrix& worst) {
  const PrecedenceGraph& g = inst.graph;
  if (g.num_jobs() > kMaxBruteForceJobs) {
    Fail(ErrorCode::kInstanceTooLarge,
         "brute force limited to " + std::to_string(kMaxBruteForceJobs) +
             " jobs");
  }
  if (!IsAnchoredSet(inst, worst, {})) {
    Fail(ErrorCode::kDeadlineInfeasible, "deadline below the minimum makespan");
  }
  // Subsets of an anchored set are anchored, so only jobs anchorable on
  // their own can appear.
  std::vector<int> candidates;
  for (int j = 1; j <= g.num_jobs(); ++j) {
    const int single[] = {j};
    if (IsAnchoredSet(inst, worst, single)) candidates.push_back(j);
  }
  const int k = static_cast<int>(candidates.size());
  const uint32_t count = uint32_t{1} << k;
  std::vector<double> weight(count, 0.0);
  for (uint32_t mask = 1; mask < count; ++mask) {
    const int low = std::countr_zero(mask);
    weight[mask] = weight[mask & (mask - 1)] + inst.weights[candidates[low] - 1];
  }
  auto members = [&](uint32_t mask) {
    std::vector<int> out;
    for (int b = 0; b < k; ++b) {
      if (mask >> b & 1u) out.push_back(candidates[b]);
    }
    return out;
  };
  std::vector<uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (weight[a] != weight[b]) return weight[a] > weight[b];
    return a < b;
  });
  // Scan the best anchored weight class completely for the tie-break.
  std::optional<uint32_t> best;
  for (uint32_t mask : order) {
    if (best.has_value() && weight[mask] < weight[*best]) break;
    const std::vector<int> h = members(mask);
    if (!IsAnchoredSet(inst, worst, h)) continue;
    if (!best.has_value() || h < members(*best)) best = mask;
  }
  AnchoredSolution sol;
  sol.anchored = members(*best);
  sol.objective = AnchoredWeight(inst, sol.anchored);
  sol.schedule = DominantSchedule(inst, worst, sol.anchored);
  return sol;
}

inline AnchoredSolution BruteForceOptimum(const Instance& inst) {
  return BruteForceOptimum(inst, WorstCaseLongestPaths(inst.graph, inst.uncertainty));
}

// Full audit of a solution: x is a schedule of G(p) meeting the deadline and
// H is x-anchored.
inline bool IsFeasibleSolution(const Instance& inst,
                               const LongestPathMatrix& worst,
                               const AnchoredSolution& sol, double tol = kEps) {
  if (!IsSchedule(inst.graph, sol.schedule, tol)) return false;
  if (sol.schedule.makespan() > inst.deadline + tol) return false;
  return IsXAnchored(inst.graph, worst, sol.schedule, sol.anchored, tol);
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_ANCHORED_H_
