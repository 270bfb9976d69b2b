#ifndef ANCHORSCHED_UNCERTAINTY_H_
#define ANCHORSCHED_UNCERTAINTY_H_

// Uncertainty sets on processing-time deviations and the worst-case longest
// path values L^D(i, j) = max over deviations d of L_{G(p + d)}(i, j).
//
// All deviation vectors are job-indexed (entry k is job k + 1).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "anchorsched/common.h"
#include "anchorsched/graph.h"
#include "anchorsched/milp.h"

namespace anchorsched {

// Every job may deviate by its full dhat simultaneously.
struct BoxSet {
  JobVector dhat;
};

// At most `gamma` jobs deviate, job i by at most dhat_i.
struct BudgetedSet {
  JobVector dhat;
  int gamma = 0;
};

// A single job deviates, by at most dhat0.
struct OneDisruptionSet {
  double dhat0 = 0.0;
};

// Jobs split into groups; group k allows gammas[k] deviations. `parts` holds
// job ids (1..n).
struct PartitionBudgetedSet {
  JobVector dhat;
  std::vector<std::vector<int>> parts;
  std::vector<int> gammas;
};

// Convex hull of a union of budgeted sets.
struct MixedBudgetedSet {
  std::vector<BudgetedSet> components;
};

// Down-monotone convex hull of finitely many deviation vectors.
struct ScenarioSet {
  std::vector<JobVector> deltas;
};

using UncertaintySet =
    std::variant<BoxSet, BudgetedSet, OneDisruptionSet, PartitionBudgetedSet,
                 MixedBudgetedSet, ScenarioSet>;

inline std::string_view UncertaintyTypeName(const UncertaintySet& set) {
  static constexpr std::string_view kNames[] = {
      "box", "budgeted", "one_disruption", "partition", "mixed", "scenarios"};
  return kNames[set.index()];
}

inline BudgetedSet AsBudgeted(const OneDisruptionSet& set, int num_jobs) {
  return BudgetedSet{JobVector(num_jobs, set.dhat0), num_jobs > 0 ? 1 : 0};
}

namespace internal {

inline void CheckDeviations(std::span<const double> dhat, int num_jobs,
                            std::string_view what) {
  if (static_cast<int>(dhat.size()) != num_jobs) {
    Fail(ErrorCode::kInvalidArgument,
         std::string(what) + " needs one entry per job");
  }
  for (double d : dhat) {
    if (!std::isfinite(d) || d < 0.0) {
      Fail(ErrorCode::kInvalidArgument,
           std::string(what) + " entries must be finite and >= 0");
    }
  }
}

inline void ValidateBudgeted(const BudgetedSet& set, int num_jobs) {
  CheckDeviations(set.dhat, num_jobs, "dhat");
  if (set.gamma < 0 || set.gamma > num_jobs) {
    Fail(ErrorCode::kBudgetOutOfRange,
         "gamma " + std::to_string(set.gamma) + " outside 0.." +
             std::to_string(num_jobs));
  }
}

}  // namespace internal

// Throws BudgetOutOfRange, EmptyScenarioList or InvalidArgument.
inline void ValidateUncertainty(const UncertaintySet& set, int num_jobs) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSet>) {
          internal::CheckDeviations(s.dhat, num_jobs, "dhat");
        } else if constexpr (std::is_same_v<T, BudgetedSet>) {
          internal::ValidateBudgeted(s, num_jobs);
        } else if constexpr (std::is_same_v<T, OneDisruptionSet>) {
          if (!std::isfinite(s.dhat0) || s.dhat0 < 0.0) {
            Fail(ErrorCode::kInvalidArgument, "dhat0 must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, PartitionBudgetedSet>) {
          internal::CheckDeviations(s.dhat, num_jobs, "dhat");
          if (s.parts.size() != s.gammas.size()) {
            Fail(ErrorCode::kInvalidArgument, "one gamma per group required");
          }
          std::vector<int> seen(num_jobs + 1, 0);
          for (size_t k = 0; k < s.parts.size(); ++k) {
            if (s.parts[k].empty()) {
              Fail(ErrorCode::kInvalidArgument, "empty partition group");
            }
            for (int j : s.parts[k]) {
              if (j < 1 || j > num_jobs || seen[j]++ > 0) {
                Fail(ErrorCode::kInvalidArgument,
                     "partition groups must be disjoint job ids");
              }
            }
            if (s.gammas[k] < 0 ||
                s.gammas[k] > static_cast<int>(s.parts[k].size())) {
              Fail(ErrorCode::kBudgetOutOfRange,
                   "group budget outside 0..|group|");
            }
          }
          for (int j = 1; j <= num_jobs; ++j) {
            if (seen[j] == 0) {
              Fail(ErrorCode::kInvalidArgument,
                   "partition does not cover job " + std::to_string(j));
            }
          }
        } else if constexpr (std::is_same_v<T, MixedBudgetedSet>) {
          if (s.components.empty()) {
            Fail(ErrorCode::kInvalidArgument, "mixed set without components");
          }
          for (const BudgetedSet& c : s.components) {
            internal::ValidateBudgeted(c, num_jobs);
          }
        } else {
          if (s.deltas.empty()) {
            Fail(ErrorCode::kEmptyScenarioList, "scenario list is empty");
          }
          for (const JobVector& d : s.deltas) {
            internal::CheckDeviations(d, num_jobs, "scenario");
          }
        }
      },
      set);
}

// Longest paths from `source` under budgeted deviations. Entry [v][g] is the
// longest source-v path when at most g jobs deviate (kUnreachable when v is
// not reachable), so each row is nondecreasing in g.
inline std::vector<std::vector<double>> BudgetedDp(const PrecedenceGraph& g,
                                                   std::span<const double> dhat,
                                                   int gamma, Vertex source) {
  const int nv = g.num_vertices();
  std::vector<std::vector<double>> val(
      nv, std::vector<double>(gamma + 1, kUnreachable));
  std::fill(val[source].begin(), val[source].end(), 0.0);
  for (Vertex i : g.topological_order()) {
    if (val[i][0] == kUnreachable) continue;
    const double p = g.processing(i);
    const double d = g.IsJob(i) ? dhat[i - 1] : 0.0;
    for (Vertex j : g.successors(i)) {
      std::vector<double>& out = val[j];
      for (int b = 0; b <= gamma; ++b) {
        double best = val[i][b] + p;
        if (b > 0) best = std::max(best, val[i][b - 1] + p + d);
        out[b] = std::max(out[b], best);
      }
    }
  }
  return val;
}

namespace internal {

inline constexpr int64_t kMaxPartitionStates = 1'000'000;

inline std::vector<double> BudgetedLongestFrom(const PrecedenceGraph& g,
                                               const BudgetedSet& set,
                                               Vertex source) {
  const auto table = BudgetedDp(g, set.dhat, set.gamma, source);
  std::vector<double> out(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) out[v] = table[v].back();
  return out;
}

// Longest paths from `source` with one budget counter per group, encoded as
// a mixed-radix index.
inline std::vector<double> PartitionLongestFrom(const PrecedenceGraph& g,
                                                const PartitionBudgetedSet& set,
                                                Vertex source) {
  const int groups = static_cast<int>(set.parts.size());
  std::vector<int64_t> stride(groups + 1, 1);
  for (int k = 0; k < groups; ++k) {
    stride[k + 1] = stride[k] * (set.gammas[k] + 1);
    if (stride[k + 1] > kMaxPartitionStates) {
      Fail(ErrorCode::kEnumerationTooLarge,
           "partition budget vector exceeds 1e6 states");
    }
  }
  const int64_t states = stride[groups];
  std::vector<int> group_of(g.num_vertices(), -1);
  for (int k = 0; k < groups; ++k) {
    for (int j : set.parts[k]) group_of[j] = k;
  }
  const int nv = g.num_vertices();
  std::vector<double> val(static_cast<size_t>(nv) * states, kUnreachable);
  auto at = [&](Vertex v, int64_t s) -> double& {
    return val[static_cast<size_t>(v) * states + s];
  };
  for (int64_t s = 0; s < states; ++s) at(source, s) = 0.0;
  for (Vertex i : g.topological_order()) {
    if (at(i, 0) == kUnreachable) continue;
    const double p = g.processing(i);
    const int k = group_of[i];
    const double d = k >= 0 ? set.dhat[i - 1] : 0.0;
    for (Vertex j : g.successors(i)) {
      for (int64_t s = 0; s < states; ++s) {
        double best = at(i, s) + p;
        if (k >= 0 && (s / stride[k]) % (set.gammas[k] + 1) > 0) {
          best = std::max(best, at(i, s - stride[k]) + p + d);
        }
        at(j, s) = std::max(at(j, s), best);
      }
    }
  }
  std::vector<double> out(nv);
  for (Vertex v = 0; v < nv; ++v) out[v] = at(v, states - 1);
  return out;
}

}  // namespace internal

// Worst-case longest path lengths from `source` to every vertex.
inline std::vector<double> WorstCaseLongestPathsFrom(const PrecedenceGraph& g,
                                                     const UncertaintySet& set,
                                                     Vertex source) {
  return std::visit(
      [&](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSet>) {
          const std::vector<double> w = g.VertexWeights(s.dhat);
          return LongestPathsFrom(g, VertexWeighted{w}, source);
        } else if constexpr (std::is_same_v<T, BudgetedSet>) {
          return internal::BudgetedLongestFrom(g, s, source);
        } else if constexpr (std::is_same_v<T, OneDisruptionSet>) {
          return internal::BudgetedLongestFrom(g, AsBudgeted(s, g.num_jobs()),
                                               source);
        } else if constexpr (std::is_same_v<T, PartitionBudgetedSet>) {
          return internal::PartitionLongestFrom(g, s, source);
        } else if constexpr (std::is_same_v<T, MixedBudgetedSet>) {
          std::vector<double> out(g.num_vertices(), kUnreachable);
          for (const BudgetedSet& c : s.components) {
            const auto part = internal::BudgetedLongestFrom(g, c, source);
            for (size_t v = 0; v < out.size(); ++v) {
              out[v] = std::max(out[v], part[v]);
            }
          }
          return out;
        } else {
          std::vector<double> out(g.num_vertices(), kUnreachable);
          for (const JobVector& delta : s.deltas) {
            const std::vector<double> w = g.VertexWeights(delta);
            const auto part = LongestPathsFrom(g, VertexWeighted{w}, source);
            for (size_t v = 0; v < out.size(); ++v) {
              out[v] = std::max(out[v], part[v]);
            }
          }
          return out;
        }
      },
      set);
}

inline LongestPathMatrix WorstCaseLongestPaths(const PrecedenceGraph& g,
                                               const UncertaintySet& set) {
  ValidateUncertainty(set, g.num_jobs());
  LongestPathMatrix m(g.num_vertices());
  for (Vertex i = 0; i < g.num_vertices(); ++i) {
    const std::vector<double> row = WorstCaseLongestPathsFrom(g, set, i);
    for (Vertex j = 0; j < g.num_vertices(); ++j) {
      if (j != i && row[j] != kUnreachable) m.Set(i, j, row[j]);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Enumeration of the deviation vectors spanning a set.

namespace internal {

inline constexpr int kMaxEnumerationJobs = 20;
inline constexpr int kMaxEnumerationBudget = 3;

// Calls fn(chosen) for every subset of `items` with at most `limit` members.
inline void ForEachSubset(std::span<const int> items, int limit,
                          const std::function<void(std::span<const int>)>& fn) {
  std::vector<int> chosen;
  std::function<void(size_t)> rec = [&](size_t from) {
    fn(chosen);
    if (static_cast<int>(chosen.size()) == limit) return;
    for (size_t k = from; k < items.size(); ++k) {
      chosen.push_back(items[k]);
      rec(k + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

inline void CheckEnumerable(int num_jobs, int gamma, bool budgeted) {
  if (num_jobs > kMaxEnumerationJobs) {
    Fail(ErrorCode::kEnumerationTooLarge,
         "extreme-point enumeration limited to 20 jobs");
  }
  if (budgeted && gamma > kMaxEnumerationBudget && gamma < num_jobs) {
    Fail(ErrorCode::kEnumerationTooLarge,
         "extreme-point enumeration limited to budgets <= 3");
  }
}

inline void ForEachBudgetedPoint(
    const BudgetedSet& s, int num_jobs,
    const std::function<void(std::span<const double>)>& fn) {
  CheckEnumerable(num_jobs, s.gamma, true);
  std::vector<int> jobs(num_jobs);
  std::iota(jobs.begin(), jobs.end(), 0);
  JobVector delta(num_jobs, 0.0);
  ForEachSubset(jobs, s.gamma, [&](std::span<const int> chosen) {
    std::fill(delta.begin(), delta.end(), 0.0);
    for (int k : chosen) delta[k] = s.dhat[k];
    fn(delta);
  });
}

}  // namespace internal

// Calls fn once per extreme deviation vector of `set`. Box sets yield all
// 2^n patterns. Throws EnumerationTooLarge beyond 20 jobs or, for budgeted
// sets, budgets above 3 (unless the budget covers every job).
inline void ForEachExtremePoint(
    const UncertaintySet& set, int num_jobs,
    const std::function<void(std::span<const double>)>& fn) {
  ValidateUncertainty(set, num_jobs);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSet>) {
          internal::CheckEnumerable(num_jobs, 0, false);
          internal::ForEachBudgetedPoint(BudgetedSet{s.dhat, num_jobs},
                                         num_jobs, fn);
        } else if constexpr (std::is_same_v<T, BudgetedSet>) {
          internal::ForEachBudgetedPoint(s, num_jobs, fn);
        } else if constexpr (std::is_same_v<T, OneDisruptionSet>) {
          internal::ForEachBudgetedPoint(AsBudgeted(s, num_jobs), num_jobs, fn);
        } else if constexpr (std::is_same_v<T, PartitionBudgetedSet>) {
          internal::CheckEnumerable(num_jobs, 0, false);
          for (size_t k = 0; k < s.parts.size(); ++k) {
            internal::CheckEnumerable(static_cast<int>(s.parts[k].size()),
                                      s.gammas[k], true);
          }
          JobVector delta(num_jobs, 0.0);
          std::function<void(size_t)> rec = [&](size_t group) {
            if (group == s.parts.size()) {
              fn(delta);
              return;
            }
            internal::ForEachSubset(
                s.parts[group], s.gammas[group],
                [&](std::span<const int> chosen) {
                  for (int j : chosen) delta[j - 1] = s.dhat[j - 1];
                  rec(group + 1);
                  for (int j : chosen) delta[j - 1] = 0.0;
                });
          };
          rec(0);
        } else if constexpr (std::is_same_v<T, MixedBudgetedSet>) {
          for (const BudgetedSet& c : s.components) {
            internal::ForEachBudgetedPoint(c, num_jobs, fn);
          }
        } else {
          internal::CheckEnumerable(num_jobs, 0, false);
          for (const JobVector& d : s.deltas) fn(d);
        }
      },
      set);
}

inline std::vector<JobVector> ExtremePoints(const UncertaintySet& set,
                                            int num_jobs) {
  std::vector<JobVector> out;
  ForEachExtremePoint(set, num_jobs, [&](std::span<const double> d) {
    out.emplace_back(d.begin(), d.end());
  });
  return out;
}

// ---------------------------------------------------------------------------
// Membership.

namespace internal {

inline bool InBudgeted(const BudgetedSet& s, std::span<const double> delta,
                       double tol) {
  double used = 0.0;
  for (size_t k = 0; k < delta.size(); ++k) {
    if (delta[k] > s.dhat[k] + tol) return false;
    if (s.dhat[k] > 0.0) used += delta[k] / s.dhat[k];
  }
  return used <= s.gamma + tol;
}

// Feasibility LP: delta <= sum_k y_k with y_k in lambda_k * (set k) and
// lambda in the unit simplex.
inline bool InHullOfBudgeted(std::span<const BudgetedSet> components,
                             std::span<const double> delta, double tol) {
  const int n = static_cast<int>(delta.size());
  MipModel lp;
  std::vector<int> lambda;
  std::vector<std::vector<int>> y(components.size());
  std::vector<LinearTerm> simplex;
  for (size_t k = 0; k < components.size(); ++k) {
    const BudgetedSet& c = components[k];
    lambda.push_back(lp.AddVariable("lambda" + std::to_string(k), 0.0, 1.0));
    simplex.push_back({lambda.back(), 1.0});
    std::vector<LinearTerm> budget{{lambda.back(), -double(c.gamma)}};
    for (int i = 0; i < n; ++i) {
      y[k].push_back(lp.AddVariable("y", 0.0, c.dhat[i]));
      lp.AddConstraint("cap", {{y[k][i], 1.0}, {lambda.back(), -c.dhat[i]}},
                       Relation::kLessEqual, 0.0);
      if (c.dhat[i] > 0.0) budget.push_back({y[k][i], 1.0 / c.dhat[i]});
    }
    lp.AddConstraint("budget", budget, Relation::kLessEqual, 0.0);
  }
  lp.AddConstraint("simplex", simplex, Relation::kEqual, 1.0);
  for (int i = 0; i < n; ++i) {
    std::vector<LinearTerm> cover;
    for (size_t k = 0; k < components.size(); ++k) cover.push_back({y[k][i], 1.0});
    lp.AddConstraint("cover", cover, Relation::kGreaterEqual, delta[i] - tol);
  }
  return SolveLp(lp).status == SolveStatus::kOptimal;
}

inline bool InHullOfScenarios(std::span<const JobVector> deltas,
                              std::span<const double> delta, double tol) {
  MipModel lp;
  std::vector<LinearTerm> simplex;
  for (size_t s = 0; s < deltas.size(); ++s) {
    simplex.push_back({lp.AddVariable("lambda", 0.0, 1.0), 1.0});
  }
  lp.AddConstraint("simplex", simplex, Relation::kEqual, 1.0);
  for (size_t i = 0; i < delta.size(); ++i) {
    std::vector<LinearTerm> cover;
    for (size_t s = 0; s < deltas.size(); ++s) {
      cover.push_back({static_cast<int>(s), deltas[s][i]});
    }
    lp.AddConstraint("cover", cover, Relation::kGreaterEqual, delta[i] - tol);
  }
  return SolveLp(lp).status == SolveStatus::kOptimal;
}

}  // namespace internal

// Membership in the (down-monotone, convex) set. Requires delta >= 0.
inline bool Contains(const UncertaintySet& set, std::span<const double> delta,
                     double tol = kEps) {
  for (double d : delta) {
    if (d < -tol) return false;
  }
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        const int n = static_cast<int>(delta.size());
        if constexpr (std::is_same_v<T, BoxSet>) {
          for (int k = 0; k < n; ++k) {
            if (delta[k] > s.dhat[k] + tol) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, BudgetedSet>) {
          return internal::InBudgeted(s, delta, tol);
        } else if constexpr (std::is_same_v<T, OneDisruptionSet>) {
          return internal::InBudgeted(AsBudgeted(s, n), delta, tol);
        } else if constexpr (std::is_same_v<T, PartitionBudgetedSet>) {
          for (size_t k = 0; k < s.parts.size(); ++k) {
            double used = 0.0;
            for (int j : s.parts[k]) {
              if (delta[j - 1] > s.dhat[j - 1] + tol) return false;
              if (s.dhat[j - 1] > 0.0) used += delta[j - 1] / s.dhat[j - 1];
            }
            if (used > s.gammas[k] + tol) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, MixedBudgetedSet>) {
          for (const BudgetedSet& c : s.components) {
            if (internal::InBudgeted(c, delta, tol)) return true;
          }
          return internal::InHullOfBudgeted(s.components, delta, tol);
        } else {
          return internal::InHullOfScenarios(s.deltas, delta, tol);
        }
      },
      set);
}

// Coordinatewise supremum of the set.
inline JobVector SupremumVector(const UncertaintySet& set, int num_jobs) {
  return std::visit(
      [&](const auto& s) -> JobVector {
        using T = std::decay_t<decltype(s)>;
        auto budgeted_sup = [&](const BudgetedSet& b) {
          return b.gamma > 0 ? b.dhat : JobVector(num_jobs, 0.0);
        };
        if constexpr (std::is_same_v<T, BoxSet>) {
          return s.dhat;
        } else if constexpr (std::is_same_v<T, BudgetedSet>) {
          return budgeted_sup(s);
        } else if constexpr (std::is_same_v<T, OneDisruptionSet>) {
          return budgeted_sup(AsBudgeted(s, num_jobs));
        } else if constexpr (std::is_same_v<T, PartitionBudgetedSet>) {
          JobVector out(num_jobs, 0.0);
          for (size_t k = 0; k < s.parts.size(); ++k) {
            if (s.gammas[k] == 0) continue;
            for (int j : s.parts[k]) out[j - 1] = s.dhat[j - 1];
          }
          return out;
        } else if constexpr (std::is_same_v<T, MixedBudgetedSet>) {
          JobVector out(num_jobs, 0.0);
          for (const BudgetedSet& c : s.components) {
            const JobVector sup = budgeted_sup(c);
            for (int k = 0; k < num_jobs; ++k) out[k] = std::max(out[k], sup[k]);
          }
          return out;
        } else {
          JobVector out(num_jobs, 0.0);
          for (const JobVector& d : s.deltas) {
            for (int k = 0; k < num_jobs; ++k) out[k] = std::max(out[k], d[k]);
          }
          return out;
        }
      },
      set);
}

// The greatest element of the set when it has one; the set then behaves as a
// box with that deviation vector.
inline std::optional<JobVector> GreatestElement(const UncertaintySet& set,
                                                int num_jobs) {
  JobVector sup = SupremumVector(set, num_jobs);
  if (Contains(set, sup)) return sup;
  return std::nullopt;
}

// The uniform deviation dhat0 when the set is a 1-disruption set (a single
// job deviates, every job by the same amount).
inline std::optional<double> OneDisruptionDeviation(const UncertaintySet& set) {
  auto uniform = [&](const BudgetedSet& b) -> std::optional<double> {
    if (b.gamma != 1 || b.dhat.empty()) return std::nullopt;
    for (double d : b.dhat) {
      if (d != b.dhat.front()) return std::nullopt;
    }
    return b.dhat.front();
  };
  if (const auto* s = std::get_if<OneDisruptionSet>(&set)) return s->dhat0;
  if (const auto* s = std::get_if<BudgetedSet>(&set)) return uniform(*s);
  if (const auto* s = std::get_if<MixedBudgetedSet>(&set)) {
    if (s->components.size() == 1) return uniform(s->components.front());
  }
  if (const auto* s = std::get_if<PartitionBudgetedSet>(&set)) {
    if (s->parts.size() == 1) {
      return uniform(BudgetedSet{s->dhat, s->gammas.front()});
    }
  }
  return std::nullopt;
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_UNCERTAINTY_H_
