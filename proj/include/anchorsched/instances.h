#ifndef ANCHORSCHED_INSTANCES_H_
#define ANCHORSCHED_INSTANCES_H_

// Random instance classes labeled F1_F2_F3_F4:
//   F1 graph       ER (pair probability 10/n) | SP (series-parallel)
//   F2 processing  pZero | pRand (integers in [5,20]) | pQCri (quasi-critical)
//   F3 deviation   dRand (integers in [1, p/2]) | dUnif (one drawn value)
//   F4 set         G1 | G2 | G3 (budgeted) | Partition | Mixed
// Every generator is a pure function of its parameters and seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "anchorsched/anchored.h"
#include "anchorsched/common.h"
#include "anchorsched/graph.h"
#include "anchorsched/random.h"
#include "anchorsched/uncertainty.h"

namespace anchorsched {

enum class GraphClass { kEr, kSp };
enum class ProcessingClass { kZero, kRand, kQCri };
enum class DeviationClass { kRand, kUnif };
enum class SetClass { kG1, kG2, kG3, kPartition, kMixed };

struct InstanceClass {
  GraphClass graph = GraphClass::kEr;
  ProcessingClass processing = ProcessingClass::kRand;
  DeviationClass deviation = DeviationClass::kRand;
  SetClass set = SetClass::kG1;

  friend bool operator==(const InstanceClass&, const InstanceClass&) = default;
};

namespace internal {

inline constexpr std::string_view kGraphTokens[] = {"ER", "SP"};
inline constexpr std::string_view kProcessingTokens[] = {"pZero", "pRand",
                                                         "pQCri"};
inline constexpr std::string_view kDeviationTokens[] = {"dRand", "dUnif"};
inline constexpr std::string_view kSetTokens[] = {"G1", "G2", "G3",
                                                  "Partition", "Mixed"};

template <typename Enum, size_t N>
Enum ParseToken(std::string_view token, const std::string_view (&names)[N],
                std::string_view field) {
  for (size_t k = 0; k < N; ++k) {
    if (names[k] == token) return static_cast<Enum>(k);
  }
  Fail(ErrorCode::kParseError, "unknown " + std::string(field) + " token '" +
                                   std::string(token) + "'");
}

// Stream ids for MixSeed; one per generator step.
enum Stream : uint64_t {
  kGraphStream = 1,
  kProcessingStream,
  kQCriStream,
  kDeviationStream,
  kUnifStream,
  kSetStream,
};

}  // namespace internal

inline InstanceClass ParseLabel(std::string_view label) {
  std::vector<std::string_view> parts;
  size_t from = 0;
  while (true) {
    const size_t cut = label.find('_', from);
    parts.push_back(label.substr(from, cut - from));
    if (cut == std::string_view::npos) break;
    from = cut + 1;
  }
  if (parts.size() != 4) {
    Fail(ErrorCode::kParseError, "label '" + std::string(label) +
                                     "' must have four fields F1_F2_F3_F4");
  }
  InstanceClass c;
  c.graph = internal::ParseToken<GraphClass>(parts[0], internal::kGraphTokens,
                                             "graph");
  c.processing = internal::ParseToken<ProcessingClass>(
      parts[1], internal::kProcessingTokens, "processing");
  c.deviation = internal::ParseToken<DeviationClass>(
      parts[2], internal::kDeviationTokens, "deviation");
  c.set = internal::ParseToken<SetClass>(parts[3], internal::kSetTokens, "set");
  return c;
}

inline std::string FormatLabel(const InstanceClass& c) {
  std::string out(internal::kGraphTokens[static_cast<int>(c.graph)]);
  out += "_";
  out += internal::kProcessingTokens[static_cast<int>(c.processing)];
  out += "_";
  out += internal::kDeviationTokens[static_cast<int>(c.deviation)];
  out += "_";
  out += internal::kSetTokens[static_cast<int>(c.set)];
  return out;
}

// Erdos-Renyi DAG: jobs get a uniformly random order, then each pair of
// positions a < b becomes an arc with probability min(1, 10/n).
inline PrecedenceGraph GenEr(int n, uint64_t seed) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "n must be >= 1");
  Rng rng(MixSeed(seed, internal::kGraphStream));
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k + 1;
  rng.Shuffle(order);
  const double pr = std::min(1.0, 10.0 / n);
  std::vector<Arc> arcs;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (rng.Bernoulli(pr)) arcs.push_back({order[a], order[b]});
    }
  }
  return PrecedenceGraph::WithTerminalArcs(n, std::move(arcs), JobVector(n, 0.0));
}

// Series-parallel graph with exactly n jobs. A component with k jobs between
// terminals u and v is a single arc (k = 0), a series composition of a and
// k - 1 - a jobs around a new middle job, or (k >= 2) a parallel composition
// of a >= 1 and k - a >= 1 jobs; both shapes are drawn with probability 1/2.
inline PrecedenceGraph GenSp(int n, uint64_t seed) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "n must be >= 1");
  Rng rng(MixSeed(seed, internal::kGraphStream));
  std::vector<Arc> arcs;
  int next_job = 1;
  const Vertex sink = n + 1;
  std::function<void(int, Vertex, Vertex)> build = [&](int k, Vertex u,
                                                       Vertex v) {
    if (k == 0) {
      arcs.push_back({u, v});
      return;
    }
    const bool parallel = k >= 2 && rng.Bernoulli(0.5);
    if (parallel) {
      const int a = static_cast<int>(rng.UniformInt(1, k - 1));
      build(a, u, v);
      build(k - a, u, v);
    } else {
      const int a = static_cast<int>(rng.UniformInt(0, k - 1));
      const Vertex middle = next_job++;
      build(a, u, middle);
      build(k - 1 - a, middle, v);
    }
  };
  build(n, 0, sink);
  return PrecedenceGraph(n, std::move(arcs), JobVector(n, 0.0));
}

inline PrecedenceGraph GenGraph(GraphClass c, int n, uint64_t seed) {
  return c == GraphClass::kEr ? GenEr(n, seed) : GenSp(n, seed);
}

// Processing times for graph g (whose own times are ignored).
inline JobVector GenProcessing(ProcessingClass c, const PrecedenceGraph& g,
                               uint64_t seed) {
  const int n = g.num_jobs();
  if (c == ProcessingClass::kZero) return JobVector(n, 0.0);
  Rng rng(MixSeed(seed, internal::kProcessingStream));
  JobVector p(n);
  for (double& v : p) v = static_cast<double>(rng.UniformInt(5, 20));
  if (c == ProcessingClass::kRand) return p;

  // Raise a random job with slack by exactly its slack until none is left.
  Rng pick(MixSeed(seed, internal::kQCriStream));
  for (;;) {
    const PrecedenceGraph timed = g.WithProcessing(p);
    const std::vector<double> w = timed.VertexWeights();
    const auto from_s = LongestPathsFrom(timed, VertexWeighted{w}, timed.source());
    const auto to_t = LongestPathsTo(timed, VertexWeighted{w}, timed.sink());
    const double length = from_s[timed.sink()];
    std::vector<int> slack_jobs;
    for (Vertex j = 1; j <= n; ++j) {
      if (from_s[j] + to_t[j] < length - kEps) slack_jobs.push_back(j);
    }
    if (slack_jobs.empty()) return p;
    const int j = slack_jobs[pick.UniformInt(0, static_cast<int64_t>(slack_jobs.size()) - 1)];
    p[j - 1] += length - (from_s[j] + to_t[j]);
  }
}

// dRand draws integers in [1, floor(p_i / 2)]; with zero processing times the
// companion vector (the dRand draw of the pQCri instance) is copied. dUnif
// broadcasts one entry of that dRand vector, drawn uniformly.
inline JobVector GenDeviation(DeviationClass c, const JobVector& p, uint64_t seed,
                              const std::optional<JobVector>& companion = {}) {
  const bool zero = std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; });
  JobVector drand;
  if (zero && !p.empty()) {
    if (!companion.has_value()) {
      Fail(ErrorCode::kMissingCompanionDeviation,
           "zero processing times need the companion deviation vector");
    }
    if (companion->size() != p.size()) {
      Fail(ErrorCode::kInvalidArgument, "companion deviation has wrong size");
    }
    drand = *companion;
  } else {
    Rng rng(MixSeed(seed, internal::kDeviationStream));
    drand.resize(p.size());
    for (size_t k = 0; k < p.size(); ++k) {
      const int64_t hi = static_cast<int64_t>(std::floor(p[k] / 2.0));
      if (hi < 1) {
        Fail(ErrorCode::kInvalidArgument,
             "dRand needs processing times >= 2 (job " + std::to_string(k + 1) +
                 ")");
      }
      drand[k] = static_cast<double>(rng.UniformInt(1, hi));
    }
  }
  if (c == DeviationClass::kRand || drand.empty()) return drand;
  Rng rng(MixSeed(seed, internal::kUnifStream));
  const double value =
      drand[rng.UniformInt(0, static_cast<int64_t>(drand.size()) - 1)];
  return JobVector(drand.size(), value);
}

inline UncertaintySet BuildUncertainty(SetClass c, const JobVector& dhat,
                                       uint64_t seed) {
  const int n = static_cast<int>(dhat.size());
  switch (c) {
    case SetClass::kG1: return BudgetedSet{dhat, std::min(1, n)};
    case SetClass::kG2: return BudgetedSet{dhat, std::min(2, n)};
    case SetClass::kG3: return BudgetedSet{dhat, std::min(3, n)};
    case SetClass::kPartition: {
      Rng rng(MixSeed(seed, internal::kSetStream));
      std::vector<int> first;
      std::vector<int> second;
      JobVector scaled = dhat;
      for (int j = 1; j <= n; ++j) {
        if (rng.Bernoulli(0.75)) {
          first.push_back(j);
          scaled[j - 1] = std::floor(0.1 * dhat[j - 1]);
        } else {
          second.push_back(j);
        }
      }
      PartitionBudgetedSet set;
      set.dhat = std::move(scaled);
      if (!first.empty()) {
        set.gammas.push_back(std::min<int>(10, static_cast<int>(first.size())));
        set.parts.push_back(std::move(first));
      }
      if (!second.empty()) {
        set.gammas.push_back(1);
        set.parts.push_back(std::move(second));
      }
      return set;
    }
    case SetClass::kMixed: {
      JobVector scaled(dhat);
      for (double& d : scaled) d *= 0.2;
      return MixedBudgetedSet{
          {BudgetedSet{dhat, std::min(1, n)}, BudgetedSet{scaled, std::min(10, n)}}};
    }
  }
  Fail(ErrorCode::kInvalidArgument, "unknown set class");
}

// M = (L_{G(p)}(s,t) + L_{G(p + dhat)}(s,t)) / 2.
inline double HalfwayDeadline(const PrecedenceGraph& g,
                              std::span<const double> dhat) {
  const std::vector<double> full = g.VertexWeights(dhat);
  return 0.5 * (EarliestSchedule(g).makespan() + EarliestSchedule(g, full).makespan());
}

inline Instance GenerateInstance(const InstanceClass& c, int n, uint64_t seed) {
  const PrecedenceGraph shape = GenGraph(c.graph, n, seed);
  const JobVector p = GenProcessing(c.processing, shape, seed);
  std::optional<JobVector> companion;
  if (c.processing == ProcessingClass::kZero) {
    companion = GenDeviation(DeviationClass::kRand,
                             GenProcessing(ProcessingClass::kQCri, shape, seed),
                             seed);
  }
  const JobVector dhat = GenDeviation(c.deviation, p, seed, companion);
  Instance inst;
  inst.graph = shape.WithProcessing(p);
  inst.uncertainty = BuildUncertainty(c.set, dhat, seed);
  inst.deadline = HalfwayDeadline(inst.graph, dhat);
  inst.weights.assign(n, 1.0);
  inst.meta.label = FormatLabel(c);
  inst.meta.seed = seed;
  inst.meta.prng = std::string(Rng::kName);
  if (c.graph == GraphClass::kEr) {
    inst.meta.notes = "ER pairs sampled over a uniformly random job order";
  }
  return inst;
}

inline Instance GenerateInstance(std::string_view label, int n, uint64_t seed) {
  return GenerateInstance(ParseLabel(label), n, seed);
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_INSTANCES_H_
