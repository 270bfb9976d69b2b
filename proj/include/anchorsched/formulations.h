#ifndef ANCHORSCHED_FORMULATIONS_H_
#define ANCHORSCHED_FORMULATIONS_H_

// MIP formulations of the anchored scheduling problem:
//   Std  linearized pairwise anchoring rows x_j - x_i >= L^D(i,j)(h_i + h_j - 1);
//   Dom  dominance rows z_j - z_i >= L0(i,j) + (L^D(i,j) - L0(i,j)) h_j;
//   Lay  layered graph with Gamma + 1 copies of G (budgeted sets only).
// Dom and Lay also have explicit projections onto the h space, one row per
// s-t chain of the transitive closure, separated here as cutting planes.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anchorsched/anchored.h"
#include "anchorsched/common.h"
#include "anchorsched/graph.h"
#include "anchorsched/milp.h"
#include "anchorsched/uncertainty.h"

namespace anchorsched {

enum class Formulation { kStd, kDom, kLay };

inline std::string_view FormulationName(Formulation f) {
  switch (f) {
    case Formulation::kStd: return "std";
    case Formulation::kDom: return "dom";
    case Formulation::kLay: return "lay";
  }
  return "unknown";
}

// A built model with the variable ids needed to read a solution back.
struct FormulationModel {
  Formulation kind = Formulation::kDom;
  MipModel model;
  // Job-indexed ids of the anchoring binaries.
  std::vector<int> anchor_vars;
  // Vertex-indexed ids of the baseline schedule (layer Gamma for Lay);
  // empty for the h-only model used with chain cuts.
  std::vector<int> schedule_vars;
};

namespace internal {

inline std::string VertexName(const PrecedenceGraph& g, Vertex v) {
  if (v == g.source()) return "s";
  if (v == g.sink()) return "t";
  return std::to_string(v);
}

inline std::vector<int> AddAnchorVars(const Instance& inst, MipModel* model) {
  std::vector<int> h;
  for (int j = 1; j <= inst.num_jobs(); ++j) {
    h.push_back(model->AddBinary("h_" + std::to_string(j)));
  }
  std::vector<LinearTerm> objective;
  for (int j = 1; j <= inst.num_jobs(); ++j) {
    objective.push_back({h[j - 1], inst.weights[j - 1]});
  }
  model->SetObjective(Sense::kMaximize, objective);
  return h;
}

// One schedule variable per vertex, start of s fixed at 0.
inline std::vector<int> AddScheduleVars(const PrecedenceGraph& g,
                                        std::string_view prefix, double upper,
                                        MipModel* model) {
  std::vector<int> vars;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    const double hi = v == g.source() ? 0.0 : upper;
    vars.push_back(model->AddVariable(
        std::string(prefix) + "_" + VertexName(g, v), 0.0, hi));
  }
  return vars;
}

inline void AddChvatalRows(const Instance& inst, const PathMatrices& paths,
                           const std::vector<int>& h, MipModel* model);

}  // namespace internal

struct FormulationOptions {
  // Add the rows h_j <= floor((M - L0(s,j) - L0(j,t)) / (L^D(s,j) - L0(s,j))).
  bool chvatal = false;
  // Replace M by ModelDeadline(inst) in BuildFormulation and SolveFormulation.
  bool round_deadline = true;
};

// Under 1-disruption on a critical graph every anchored-graph makespan is
// L0(s,t) + dhat0 k for an integer k, so M rounds down to that grid without
// changing the optimum. Returns M unchanged otherwise.
inline double ModelDeadline(const Instance& inst) {
  const std::optional<double> dhat0 = OneDisruptionDeviation(inst.uncertainty);
  if (!dhat0.has_value() || *dhat0 <= 0.0 || !IsCritical(inst.graph)) {
    return inst.deadline;
  }
  const double l0 = EarliestSchedule(inst.graph).makespan();
  if (inst.deadline < l0) return inst.deadline;
  return l0 + *dhat0 * std::floor((inst.deadline - l0) / *dhat0 + 1e-9);
}

namespace internal {

// The instance with its deadline rounded, or nullopt when nothing changes.
inline std::optional<Instance> RoundedDeadlineInstance(
    const Instance& inst, const FormulationOptions& options) {
  if (!options.round_deadline) return std::nullopt;
  const double deadline = ModelDeadline(inst);
  if (deadline >= inst.deadline) return std::nullopt;
  Instance rounded = inst;
  rounded.deadline = deadline;
  return rounded;
}

}  // namespace internal

// Right-hand side of the rounded deadline inequality for job j, clipped to
// {0, 1}; nullopt when L^D(s,j) = L0(s,j) and the inequality is vacuous.
inline std::optional<int> ChvatalBound(const Instance& inst,
                                       const PathMatrices& paths, Vertex j) {
  const PrecedenceGraph& g = inst.graph;
  const double denom = paths.worst(g.source(), j) - paths.nominal(g.source(), j);
  if (denom <= kEps) return std::nullopt;
  const double slack =
      inst.deadline - paths.nominal(g.source(), j) - paths.nominal(j, g.sink());
  const double ratio = std::floor(slack / denom + 1e-9);
  return ratio >= 1.0 ? 1 : 0;
}

namespace internal {

inline void AddChvatalRows(const Instance& inst, const PathMatrices& paths,
                           const std::vector<int>& h, MipModel* model) {
  for (int j = 1; j <= inst.num_jobs(); ++j) {
    if (const auto bound = ChvatalBound(inst, paths, j)) {
      model->AddConstraint("chvatal_" + std::to_string(j), {{h[j - 1], 1.0}},
                           Relation::kLessEqual, *bound);
    }
  }
}

}  // namespace internal

inline FormulationModel BuildStd(const Instance& inst, const PathMatrices& paths,
                                 const FormulationOptions& options = {}) {
  const PrecedenceGraph& g = inst.graph;
  FormulationModel fm{Formulation::kStd, {}, {}, {}};
  MipModel& m = fm.model;
  fm.schedule_vars = internal::AddScheduleVars(g, "x", inst.deadline, &m);
  fm.anchor_vars = internal::AddAnchorVars(inst, &m);
  const auto& x = fm.schedule_vars;
  const auto& h = fm.anchor_vars;
  for (const Arc& a : g.arcs()) {
    m.AddConstraint("arc_" + internal::VertexName(g, a.tail) + "_" +
                        internal::VertexName(g, a.head),
                    {{x[a.head], 1.0}, {x[a.tail], -1.0}},
                    Relation::kGreaterEqual, g.processing(a.tail));
  }
  m.AddConstraint("deadline", {{x[g.sink()], 1.0}}, Relation::kLessEqual,
                  inst.deadline);
  // h_s = 1 and h_t = 0 enter as constants; pairs ending at t are implied
  // by the arc rows.
  for (Vertex j = 1; j <= g.num_jobs(); ++j) {
    for (Vertex i = 0; i <= g.num_jobs(); ++i) {
      if (!g.Precedes(i, j)) continue;
      const double l = paths.worst(i, j);
      const std::string name =
          "std_" + internal::VertexName(g, i) + "_" + std::to_string(j);
      if (i == g.source()) {
        // x_j - x_s >= L h_j
        m.AddConstraint(name, {{x[j], 1.0}, {x[i], -1.0}, {h[j - 1], -l}},
                        Relation::kGreaterEqual, 0.0);
      } else {
        // x_j - x_i - L h_i - L h_j >= -L
        m.AddConstraint(name,
                        {{x[j], 1.0}, {x[i], -1.0}, {h[i - 1], -l},
                         {h[j - 1], -l}},
                        Relation::kGreaterEqual, -l);
      }
    }
  }
  if (options.chvatal) internal::AddChvatalRows(inst, paths, h, &m);
  return fm;
}

inline FormulationModel BuildDom(const Instance& inst, const PathMatrices& paths,
                                 const FormulationOptions& options = {}) {
  const PrecedenceGraph& g = inst.graph;
  FormulationModel fm{Formulation::kDom, {}, {}, {}};
  MipModel& m = fm.model;
  fm.schedule_vars = internal::AddScheduleVars(g, "z", inst.deadline, &m);
  fm.anchor_vars = internal::AddAnchorVars(inst, &m);
  const auto& z = fm.schedule_vars;
  const auto& h = fm.anchor_vars;
  m.AddConstraint("deadline", {{z[g.sink()], 1.0}}, Relation::kLessEqual,
                  inst.deadline);
  // Arc rows are implied: L0(i, j) >= p_i on every arc.
  for (Vertex i = 0; i <= g.num_jobs(); ++i) {
    for (Vertex j = 1; j <= g.sink(); ++j) {
      if (!g.Precedes(i, j)) continue;
      const double l0 = paths.nominal(i, j);
      std::vector<LinearTerm> terms{{z[j], 1.0}, {z[i], -1.0}};
      if (g.IsJob(j)) terms.push_back({h[j - 1], -(paths.worst(i, j) - l0)});
      m.AddConstraint("dom_" + internal::VertexName(g, i) + "_" +
                          internal::VertexName(g, j),
                      std::move(terms), Relation::kGreaterEqual, l0);
    }
  }
  if (options.chvatal) internal::AddChvatalRows(inst, paths, h, &m);
  return fm;
}

// D_j = L_{G(p + dhat)}(s, j) - L0(s, j), vertex-indexed (0 at s and t).
inline std::vector<double> LayeredShifts(const PrecedenceGraph& g,
                                         std::span<const double> dhat) {
  const std::vector<double> nominal = g.VertexWeights();
  const std::vector<double> full = g.VertexWeights(dhat);
  const auto l0 = LongestPathsFrom(g, VertexWeighted{nominal}, g.source());
  const auto l1 = LongestPathsFrom(g, VertexWeighted{full}, g.source());
  std::vector<double> shift(g.num_vertices(), 0.0);
  for (Vertex j = 1; j <= g.num_jobs(); ++j) shift[j] = l1[j] - l0[j];
  return shift;
}

// Budgeted parameters of a set the layered model accepts.
inline BudgetedSet LayeredBudget(const Instance& inst) {
  if (const auto* b = std::get_if<BudgetedSet>(&inst.uncertainty)) return *b;
  if (const auto* o = std::get_if<OneDisruptionSet>(&inst.uncertainty)) {
    return AsBudgeted(*o, inst.num_jobs());
  }
  Fail(ErrorCode::kUnsupportedUncertainty,
       "the layered formulation needs a budgeted set, got " +
           std::string(UncertaintyTypeName(inst.uncertainty)));
}

inline FormulationModel BuildLay(const Instance& inst, const PathMatrices& paths,
                                 const FormulationOptions& options = {}) {
  const BudgetedSet budget = LayeredBudget(inst);
  const PrecedenceGraph& g = inst.graph;
  const int gamma = budget.gamma;
  const std::vector<double> shift = LayeredShifts(g, budget.dhat);
  const std::vector<double> full = g.VertexWeights(budget.dhat);
  const double lower_cap =
      inst.deadline + LongestPathsFrom(g, VertexWeighted{full}, g.source())[g.sink()];

  FormulationModel fm{Formulation::kLay, {}, {}, {}};
  MipModel& m = fm.model;
  std::vector<std::vector<int>> x(gamma + 1);
  for (int layer = 0; layer <= gamma; ++layer) {
    x[layer] = internal::AddScheduleVars(
        g, "x" + std::to_string(layer), layer == gamma ? inst.deadline : lower_cap,
        &m);
  }
  fm.schedule_vars = x[gamma];
  fm.anchor_vars = internal::AddAnchorVars(inst, &m);
  const auto& h = fm.anchor_vars;

  for (int layer = 0; layer <= gamma; ++layer) {
    const std::string tag = std::to_string(layer);
    for (const Arc& a : g.arcs()) {
      const std::string arc =
          internal::VertexName(g, a.tail) + "_" + internal::VertexName(g, a.head);
      m.AddConstraint("hor" + tag + "_" + arc,
                      {{x[layer][a.head], 1.0}, {x[layer][a.tail], -1.0}},
                      Relation::kGreaterEqual, g.processing(a.tail));
      if (layer < gamma) {
        m.AddConstraint("tra" + tag + "_" + arc,
                        {{x[layer][a.head], 1.0}, {x[layer + 1][a.tail], -1.0}},
                        Relation::kGreaterEqual, full[a.tail]);
      }
    }
  }
  // x^G_j - x^g_j >= -D_j (1 - h_j)  <=>  x^G_j - x^g_j - D_j h_j >= -D_j
  for (int layer = 0; layer < gamma; ++layer) {
    for (Vertex j = 1; j <= g.num_jobs(); ++j) {
      m.AddConstraint("ver" + std::to_string(layer) + "_" + std::to_string(j),
                      {{x[gamma][j], 1.0}, {x[layer][j], -1.0},
                       {h[j - 1], -shift[j]}},
                      Relation::kGreaterEqual, -shift[j]);
    }
  }
  m.AddConstraint("deadline", {{x[gamma][g.sink()], 1.0}}, Relation::kLessEqual,
                  inst.deadline);
  if (options.chvatal) internal::AddChvatalRows(inst, paths, h, &m);
  return fm;
}

inline FormulationModel BuildFormulation(Formulation f, const Instance& inst,
                                         const PathMatrices& paths,
                                         const FormulationOptions& options = {}) {
  if (const auto rounded = internal::RoundedDeadlineInstance(inst, options)) {
    FormulationOptions plain = options;
    plain.round_deadline = false;
    return BuildFormulation(f, *rounded, paths, plain);
  }
  switch (f) {
    case Formulation::kStd: return BuildStd(inst, paths, options);
    case Formulation::kDom: return BuildDom(inst, paths, options);
    case Formulation::kLay: return BuildLay(inst, paths, options);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown formulation");
}

// ---------------------------------------------------------------------------
// Chain inequalities.

// An s-t chain (s, j_1, ..., j_k, t) of the transitive closure and how far
// its projected inequality exceeds the deadline.
struct ChainCut {
  std::vector<Vertex> chain;
  double violation = 0.0;
  // The inequality over the job-indexed h variables: sum coef_j h_j <= rhs.
  std::vector<std::pair<Vertex, double>> coefficients;
  double rhs = 0.0;
};

namespace internal {

// Per-arc affine coefficients a + b h_j of the projected rows.
struct ChainWeights {
  const Instance* inst;
  const PathMatrices* paths;
  Formulation kind;
  std::vector<double> shift;  // Lay only

  // Returns {constant, coefficient of h_j} for the closure arc (i, j), j a job.
  std::pair<double, double> Affine(Vertex i, Vertex j) const {
    const double l0 = paths->nominal(i, j);
    const double ld = paths->worst(i, j);
    if (kind == Formulation::kDom) return {l0, ld - l0};
    return {ld - shift[j], shift[j]};
  }
};

inline ChainWeights MakeChainWeights(const Instance& inst,
                                     const PathMatrices& paths,
                                     Formulation kind) {
  if (kind == Formulation::kStd) {
    Fail(ErrorCode::kInvalidArgument, "chain projections exist for dom and lay");
  }
  ChainWeights w{&inst, &paths, kind, {}};
  if (kind == Formulation::kLay) {
    w.shift = LayeredShifts(inst.graph, LayeredBudget(inst).dhat);
  }
  return w;
}

inline ChainCut MakeCut(const Instance& inst, const ChainWeights& w,
                        std::vector<Vertex> chain, double length) {
  ChainCut cut;
  cut.violation = length - inst.deadline;
  double constant = 0.0;
  for (size_t k = 1; k + 1 < chain.size(); ++k) {
    const auto [a, b] = w.Affine(chain[k - 1], chain[k]);
    constant += a;
    if (b != 0.0) cut.coefficients.push_back({chain[k], b});
  }
  const PrecedenceGraph& g = inst.graph;
  constant += w.paths->nominal(chain[chain.size() - 2], g.sink());
  cut.rhs = inst.deadline - constant;
  cut.chain = std::move(chain);
  return cut;
}

}  // namespace internal

// Longest chain under h, one per possible last job (plus the chain (s, t)),
// returning those whose row is violated by more than tol, most violated
// first.
inline std::vector<ChainCut> SeparateChains(const Instance& inst,
                                            const PathMatrices& paths,
                                            std::span<const double> h,
                                            Formulation kind,
                                            double tol = kEps) {
  const PrecedenceGraph& g = inst.graph;
  const internal::ChainWeights w = internal::MakeChainWeights(inst, paths, kind);
  const int nv = g.num_vertices();
  std::vector<double> best(nv, kUnreachable);
  std::vector<Vertex> parent(nv, -1);
  best[g.source()] = 0.0;
  for (Vertex j : g.topological_order()) {
    if (!g.IsJob(j)) continue;
    for (Vertex i : g.topological_order()) {
      if (i == g.sink() || best[i] == kUnreachable || !g.Precedes(i, j)) continue;
      const auto [a, b] = w.Affine(i, j);
      const double value = best[i] + a + b * h[j - 1];
      if (value > best[j]) {
        best[j] = value;
        parent[j] = i;
      }
    }
  }
  std::vector<ChainCut> cuts;
  for (Vertex last = 0; last <= g.num_jobs(); ++last) {
    if (best[last] == kUnreachable) continue;
    const double length = best[last] + paths.nominal(last, g.sink());
    if (length - inst.deadline <= tol) continue;
    std::vector<Vertex> chain{g.sink()};
    for (Vertex v = last; v != -1; v = parent[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    cuts.push_back(internal::MakeCut(inst, w, std::move(chain), length));
  }
  std::stable_sort(cuts.begin(), cuts.end(),
                   [](const ChainCut& a, const ChainCut& b) {
                     return a.violation > b.violation;
                   });
  return cuts;
}

// The most violated chain inequality, if any exceeds tol.
inline std::optional<ChainCut> SeparateChain(const Instance& inst,
                                             const PathMatrices& paths,
                                             std::span<const double> h,
                                             Formulation kind,
                                             double tol = kEps) {
  std::vector<ChainCut> cuts = SeparateChains(inst, paths, h, kind, tol);
  if (cuts.empty()) return std::nullopt;
  return std::move(cuts.front());
}

// Whether h lies in the projection of the LP relaxation of Dom or Lay.
inline bool InProjection(const Instance& inst, const PathMatrices& paths,
                         std::span<const double> h, Formulation kind,
                         double tol = kEps) {
  return !SeparateChain(inst, paths, h, kind, tol).has_value();
}

// Model over h alone; chain rows come from a separator.
inline FormulationModel BuildChainMaster(const Instance& inst,
                                         const PathMatrices& paths,
                                         Formulation kind,
                                         const FormulationOptions& options = {}) {
  FormulationModel fm{kind, {}, {}, {}};
  fm.anchor_vars = internal::AddAnchorVars(inst, &fm.model);
  if (options.chvatal) {
    internal::AddChvatalRows(inst, paths, fm.anchor_vars, &fm.model);
  }
  return fm;
}

inline CutSeparator ChainSeparator(const Instance& inst,
                                   const PathMatrices& paths, Formulation kind,
                                   std::vector<int> anchor_vars) {
  return [&inst, &paths, kind, h_ids = std::move(anchor_vars)](
             std::span<const double> values) {
    std::vector<double> h(h_ids.size());
    for (size_t k = 0; k < h_ids.size(); ++k) h[k] = values[h_ids[k]];
    std::vector<LinearConstraint> rows;
    for (const ChainCut& cut : SeparateChains(inst, paths, h, kind)) {
      LinearConstraint row{"chain", {}, Relation::kLessEqual, cut.rhs};
      for (const auto& [j, coef] : cut.coefficients) {
        row.terms.push_back({h_ids[j - 1], coef});
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
}

// ---------------------------------------------------------------------------
// Solving.

struct FormulationSolveOptions {
  FormulationOptions model;
  // Solve over h with separated chain rows instead of the full model.
  bool cuts = false;
  MipParams params;
};

struct FormulationResult {
  SolveResult mip;
  // Present iff an incumbent exists. The schedule is the dominant schedule
  // of the anchored set.
  std::optional<AnchoredSolution> solution;
};

inline std::vector<int> AnchoredFromValues(const FormulationModel& fm,
                                           std::span<const double> values) {
  std::vector<int> anchored;
  for (size_t k = 0; k < fm.anchor_vars.size(); ++k) {
    if (values[fm.anchor_vars[k]] > 0.5) anchored.push_back(static_cast<int>(k) + 1);
  }
  return anchored;
}

inline FormulationResult SolveFormulation(
    const Instance& inst, const PathMatrices& paths, Formulation kind,
    const FormulationSolveOptions& options = {}) {
  if (const auto rounded = internal::RoundedDeadlineInstance(inst, options.model)) {
    FormulationSolveOptions plain = options;
    plain.model.round_deadline = false;
    FormulationResult result = SolveFormulation(*rounded, paths, kind, plain);
    if (result.solution.has_value()) {
      result.solution->objective = AnchoredWeight(inst, result.solution->anchored);
    }
    return result;
  }
  FormulationResult result;
  if (options.cuts) {
    const FormulationModel fm =
        BuildChainMaster(inst, paths, kind, options.model);
    MipParams params = options.params;
    params.separator = ChainSeparator(inst, paths, kind, fm.anchor_vars);
    if (inst.deadline < paths.nominal(inst.graph.source(), inst.graph.sink()) - kEps) {
      result.mip.status = SolveStatus::kInfeasible;
      return result;
    }
    result.mip = SolveMip(fm.model, params);
    if (result.mip.has_incumbent()) {
      AnchoredSolution sol;
      sol.anchored = AnchoredFromValues(fm, result.mip.incumbent);
      sol.objective = AnchoredWeight(inst, sol.anchored);
      sol.schedule = DominantSchedule(inst, paths.worst, sol.anchored);
      result.solution = std::move(sol);
    }
    return result;
  }
  const FormulationModel fm = BuildFormulation(kind, inst, paths, options.model);
  result.mip = SolveMip(fm.model, options.params);
  if (result.mip.has_incumbent()) {
    AnchoredSolution sol;
    sol.anchored = AnchoredFromValues(fm, result.mip.incumbent);
    sol.objective = AnchoredWeight(inst, sol.anchored);
    sol.schedule = DominantSchedule(inst, paths.worst, sol.anchored);
    result.solution = std::move(sol);
  }
  return result;
}

// Optimal value of the LP relaxation of a formulation.
inline double LpBound(const Instance& inst, const PathMatrices& paths,
                      Formulation kind, const FormulationOptions& options = {}) {
  const FormulationModel fm = BuildFormulation(kind, inst, paths, options);
  const SolveResult r = SolveLp(fm.model);
  if (r.status != SolveStatus::kOptimal) {
    Fail(ErrorCode::kDeadlineInfeasible, "LP relaxation is infeasible");
  }
  return r.primal_value;
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_FORMULATIONS_H_
