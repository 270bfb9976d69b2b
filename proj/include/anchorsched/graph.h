#ifndef ANCHORSCHED_GRAPH_H_
#define ANCHORSCHED_GRAPH_H_

// Precedence graphs over jobs 1..n with a dummy source s = 0 and sink
// t = n + 1. Arc (i, j) has length p_i, with p_s = 0.

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anchorsched/common.h"

namespace anchorsched {

using Vertex = int;

struct Arc {
  Vertex tail = 0;
  Vertex head = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Returns a topological order of the digraph on vertices 0..num_vertices-1.
// Throws CycleDetected when none exists.
inline std::vector<Vertex> TopologicalOrder(int num_vertices,
                                            std::span<const Arc> arcs) {
  std::vector<int> in_degree(num_vertices, 0);
  std::vector<std::vector<Vertex>> out(num_vertices);
  for (const Arc& a : arcs) {
    if (a.tail < 0 || a.tail >= num_vertices || a.head < 0 ||
        a.head >= num_vertices) {
      Fail(ErrorCode::kInvalidGraph, "arc endpoint out of range");
    }
    out[a.tail].push_back(a.head);
    ++in_degree[a.head];
  }
  // Kahn's algorithm with a min-queue on vertex id keeps the order canonical.
  std::vector<Vertex> ready;
  for (Vertex v = num_vertices - 1; v >= 0; --v) {
    if (in_degree[v] == 0) ready.push_back(v);
  }
  std::vector<Vertex> order;
  order.reserve(num_vertices);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), std::greater<>());
    const Vertex v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (Vertex w : out[v]) {
      if (--in_degree[w] == 0) {
        ready.push_back(w);
        std::push_heap(ready.begin(), ready.end(), std::greater<>());
      }
    }
  }
  if (static_cast<int>(order.size()) != num_vertices) {
    Fail(ErrorCode::kCycleDetected, "precedence arcs contain a cycle");
  }
  return order;
}

class PrecedenceGraph {
 public:
  PrecedenceGraph() : PrecedenceGraph(0, {{0, 1}}, {}) {}

  // `processing` is job-indexed (size num_jobs). Duplicate arcs are merged.
  PrecedenceGraph(int num_jobs, std::vector<Arc> arcs, JobVector processing)
      : num_jobs_(num_jobs), arcs_(std::move(arcs)) {
    if (num_jobs < 0) Fail(ErrorCode::kInvalidGraph, "negative job count");
    if (static_cast<int>(processing.size()) != num_jobs) {
      Fail(ErrorCode::kInvalidGraph, "processing times must have one entry "
                                     "per job");
    }
    std::sort(arcs_.begin(), arcs_.end());
    arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
    const int nv = num_vertices();
    for (const Arc& a : arcs_) {
      if (a.tail == a.head) {
        Fail(ErrorCode::kCycleDetected, "self-loop on vertex " +
                                            std::to_string(a.tail));
      }
    }
    order_ = TopologicalOrder(nv, arcs_);

    succ_.assign(nv, {});
    pred_.assign(nv, {});
    for (const Arc& a : arcs_) {
      succ_[a.tail].push_back(a.head);
      pred_[a.head].push_back(a.tail);
    }
    if (!pred_[source()].empty()) {
      Fail(ErrorCode::kInvalidGraph, "source has an incoming arc");
    }
    if (!succ_[sink()].empty()) {
      Fail(ErrorCode::kInvalidGraph, "sink has an outgoing arc");
    }
    for (Vertex j = 1; j <= num_jobs_; ++j) {
      if (pred_[j].empty() || succ_[j].empty()) {
        Fail(ErrorCode::kInvalidGraph,
             "job " + std::to_string(j) + " is not on an s-t path");
      }
    }
    if (num_jobs_ == 0 && succ_[source()].empty()) {
      Fail(ErrorCode::kInvalidGraph, "empty graph needs the arc (s,t)");
    }

    processing_.assign(nv, 0.0);
    for (int k = 0; k < num_jobs_; ++k) {
      if (!(processing[k] >= 0.0) || !std::isfinite(processing[k])) {
        Fail(ErrorCode::kInvalidGraph, "processing time of job " +
                                           std::to_string(k + 1) +
                                           " must be finite and >= 0");
      }
      processing_[k + 1] = processing[k];
    }
    BuildReachability();
  }

  // Builds a graph from job-to-job arcs, adding (s,i) for every job without
  // a job predecessor and (i,t) for every job without a job successor.
  static PrecedenceGraph WithTerminalArcs(int num_jobs,
                                          std::vector<Arc> job_arcs,
                                          JobVector processing) {
    std::vector<bool> has_pred(num_jobs + 2, false);
    std::vector<bool> has_succ(num_jobs + 2, false);
    for (const Arc& a : job_arcs) {
      has_succ[a.tail] = true;
      has_pred[a.head] = true;
    }
    for (Vertex j = 1; j <= num_jobs; ++j) {
      if (!has_pred[j]) job_arcs.push_back({0, j});
      if (!has_succ[j]) job_arcs.push_back({j, num_jobs + 1});
    }
    if (num_jobs == 0) job_arcs.push_back({0, 1});
    return PrecedenceGraph(num_jobs, std::move(job_arcs),
                           std::move(processing));
  }

  int num_jobs() const { return num_jobs_; }
  int num_vertices() const { return num_jobs_ + 2; }
  Vertex source() const { return 0; }
  Vertex sink() const { return num_jobs_ + 1; }
  bool IsJob(Vertex v) const { return v >= 1 && v <= num_jobs_; }

  std::span<const Arc> arcs() const { return arcs_; }
  std::span<const Vertex> successors(Vertex v) const { return succ_[v]; }
  std::span<const Vertex> predecessors(Vertex v) const { return pred_[v]; }
  std::span<const Vertex> topological_order() const { return order_; }

  // p_v; zero for s and t.
  double processing(Vertex v) const { return processing_[v]; }

  JobVector processing_times() const {
    return JobVector(processing_.begin() + 1, processing_.end() - 1);
  }

  // Strict reachability i < j in the partial order induced by the arcs.
  bool Precedes(Vertex i, Vertex j) const {
    return (reach_[static_cast<size_t>(i) * words_ + (j >> 6)] >> (j & 63)) &
           1u;
  }

  // Vertex-indexed weights p_v + extra_v where `extra` is job-indexed.
  std::vector<double> VertexWeights(std::span<const double> extra) const {
    std::vector<double> w = processing_;
    for (int k = 0; k < num_jobs_ && k < static_cast<int>(extra.size()); ++k) {
      w[k + 1] += extra[k];
    }
    return w;
  }

  std::vector<double> VertexWeights() const { return processing_; }

  PrecedenceGraph WithProcessing(JobVector processing) const {
    return PrecedenceGraph(num_jobs_, arcs_, std::move(processing));
  }

 private:
  void BuildReachability() {
    const int nv = num_vertices();
    words_ = (nv + 63) / 64;
    reach_.assign(static_cast<size_t>(nv) * words_, 0);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const Vertex v = *it;
      uint64_t* row = &reach_[static_cast<size_t>(v) * words_];
      for (Vertex w : succ_[v]) {
        const uint64_t* other = &reach_[static_cast<size_t>(w) * words_];
        for (int k = 0; k < words_; ++k) row[k] |= other[k];
        row[w >> 6] |= uint64_t{1} << (w & 63);
      }
    }
  }

  int num_jobs_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<Vertex>> succ_;
  std::vector<std::vector<Vertex>> pred_;
  std::vector<Vertex> order_;
  std::vector<double> processing_;
  int words_ = 0;
  std::vector<uint64_t> reach_;
};

// Starting times indexed by vertex (s = 0, jobs 1..n, t = n + 1).
struct Schedule {
  std::vector<double> start;

  double makespan() const { return start.back(); }
};

// Longest path values L(i, j) for the pairs i < j of a precedence relation;
// every other entry holds kUnreachable.
class LongestPathMatrix {
 public:
  LongestPathMatrix() = default;
  explicit LongestPathMatrix(int num_vertices)
      : n_(num_vertices),
        values_(static_cast<size_t>(num_vertices) * num_vertices,
                kUnreachable) {}

  int num_vertices() const { return n_; }

  double operator()(Vertex i, Vertex j) const {
    return values_[static_cast<size_t>(i) * n_ + j];
  }
  bool Defined(Vertex i, Vertex j) const { return (*this)(i, j) != kUnreachable; }
  void Set(Vertex i, Vertex j, double value) {
    values_[static_cast<size_t>(i) * n_ + j] = value;
  }

  std::span<const double> row(Vertex i) const {
    return std::span<const double>(values_).subspan(
        static_cast<size_t>(i) * n_, n_);
  }

  // Pointwise maximum with another matrix on the same vertex set.
  void MaxWith(const LongestPathMatrix& other) {
    for (size_t k = 0; k < values_.size(); ++k) {
      values_[k] = std::max(values_[k], other.values_[k]);
    }
  }

 private:
  int n_ = 0;
  std::vector<double> values_;
};

// Adapts a vertex-indexed weight vector to an arc-weight callable: arc (i, j)
// gets weight w[i].
struct VertexWeighted {
  std::span<const double> weights;
  double operator()(Vertex tail, Vertex /*head*/) const {
    return weights[tail];
  }
};

// Longest path lengths from `source` to every vertex; kUnreachable where no
// path exists. ArcWeight is any callable (tail, head) -> double.
template <std::invocable<Vertex, Vertex> ArcWeight>
std::vector<double> LongestPathsFrom(const PrecedenceGraph& g,
                                     const ArcWeight& arc_weight,
                                     Vertex source) {
  std::vector<double> dist(g.num_vertices(), kUnreachable);
  dist[source] = 0.0;
  for (Vertex v : g.topological_order()) {
    if (dist[v] == kUnreachable) continue;
    for (Vertex w : g.successors(v)) {
      dist[w] = std::max(dist[w], dist[v] + arc_weight(v, w));
    }
  }
  return dist;
}

// Longest path lengths from every vertex to `target`.
template <std::invocable<Vertex, Vertex> ArcWeight>
std::vector<double> LongestPathsTo(const PrecedenceGraph& g,
                                   const ArcWeight& arc_weight,
                                   Vertex target) {
  std::vector<double> dist(g.num_vertices(), kUnreachable);
  dist[target] = 0.0;
  const auto order = g.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Vertex v = *it;
    for (Vertex w : g.successors(v)) {
      if (dist[w] == kUnreachable) continue;
      dist[v] = std::max(dist[v], dist[w] + arc_weight(v, w));
    }
  }
  return dist;
}

template <std::invocable<Vertex, Vertex> ArcWeight>
LongestPathMatrix AllPairsLongest(const PrecedenceGraph& g,
                                  const ArcWeight& arc_weight) {
  LongestPathMatrix m(g.num_vertices());
  for (Vertex i = 0; i < g.num_vertices(); ++i) {
    const std::vector<double> dist = LongestPathsFrom(g, arc_weight, i);
    for (Vertex j = 0; j < g.num_vertices(); ++j) {
      if (j != i && dist[j] != kUnreachable) m.Set(i, j, dist[j]);
    }
  }
  return m;
}

inline LongestPathMatrix AllPairsLongest(const PrecedenceGraph& g,
                                         std::span<const double> vertex_weights) {
  return AllPairsLongest(g, VertexWeighted{vertex_weights});
}

// L0 = longest paths with the nominal processing times.
inline LongestPathMatrix NominalLongestPaths(const PrecedenceGraph& g) {
  const std::vector<double> w = g.VertexWeights();
  return AllPairsLongest(g, w);
}

template <std::invocable<Vertex, Vertex> ArcWeight>
Schedule EarliestSchedule(const PrecedenceGraph& g,
                          const ArcWeight& arc_weight) {
  return Schedule{LongestPathsFrom(g, arc_weight, g.source())};
}

inline Schedule EarliestSchedule(const PrecedenceGraph& g,
                                 std::span<const double> vertex_weights) {
  return EarliestSchedule(g, VertexWeighted{vertex_weights});
}

inline Schedule EarliestSchedule(const PrecedenceGraph& g) {
  const std::vector<double> w = g.VertexWeights();
  return EarliestSchedule(g, w);
}

// Latest schedule of G(p) with makespan exactly `deadline`:
// x_j = M - L0(j, t), x_s = 0.
inline Schedule LatestSchedule(const PrecedenceGraph& g, double deadline) {
  const std::vector<double> w = g.VertexWeights();
  const std::vector<double> to_sink =
      LongestPathsTo(g, VertexWeighted{w}, g.sink());
  if (deadline < to_sink[g.source()] - kEps) {
    Fail(ErrorCode::kDeadlineInfeasible,
         "deadline " + std::to_string(deadline) +
             " is below the minimum makespan " +
             std::to_string(to_sink[g.source()]));
  }
  Schedule x{std::vector<double>(g.num_vertices())};
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    x.start[v] = deadline - to_sink[v];
  }
  x.start[g.source()] = 0.0;
  x.start[g.sink()] = deadline;
  return x;
}

// Every s-t path is a longest one: longest and shortest s-t lengths agree.
inline bool IsCritical(const PrecedenceGraph& g) {
  std::vector<double> longest(g.num_vertices(), kUnreachable);
  std::vector<double> shortest(g.num_vertices(), kInfinity);
  longest[g.source()] = shortest[g.source()] = 0.0;
  for (Vertex v : g.topological_order()) {
    for (Vertex w : g.successors(v)) {
      longest[w] = std::max(longest[w], longest[v] + g.processing(v));
      shortest[w] = std::min(shortest[w], shortest[v] + g.processing(v));
    }
  }
  return ApproxEqual(longest[g.sink()], shortest[g.sink()]);
}

// Every job lies on a critical path: L0(s,i) + L0(i,t) = L0(s,t).
inline bool IsQuasiCritical(const PrecedenceGraph& g) {
  const std::vector<double> w = g.VertexWeights();
  const auto from_s = LongestPathsFrom(g, VertexWeighted{w}, g.source());
  const auto to_t = LongestPathsTo(g, VertexWeighted{w}, g.sink());
  for (Vertex j = 1; j <= g.num_jobs(); ++j) {
    if (!ApproxEqual(from_s[j] + to_t[j], from_s[g.sink()])) return false;
  }
  return true;
}

inline bool IsSchedule(const PrecedenceGraph& g, const Schedule& x,
                       double tol = kEps) {
  if (static_cast<int>(x.start.size()) != g.num_vertices()) return false;
  if (std::abs(x.start[g.source()]) > tol) return false;
  for (double v : x.start) {
    if (!std::isfinite(v) || v < -tol) return false;
  }
  for (const Arc& a : g.arcs()) {
    if (x.start[a.head] - x.start[a.tail] < g.processing(a.tail) - tol) {
      return false;
    }
  }
  return true;
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_GRAPH_H_
