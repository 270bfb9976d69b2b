#ifndef ANCHORSCHED_MILP_H_
#define ANCHORSCHED_MILP_H_

// A small linear/mixed-binary modeling layer with a dense bounded dual
// simplex and a best-bound branch-and-bound driver.
//
// Every variable carries finite bounds. That lets the simplex start from the
// all-slack basis with each structural parked at the bound matching the sign
// of its cost, which is dual feasible, so no phase one is needed and every
// branch-and-bound node reoptimizes from the previous basis.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "anchorsched/common.h"

namespace anchorsched {

enum class Sense { kMaximize, kMinimize };
enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  bool is_binary = false;
};

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

struct LinearConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// Sums repeated variables (keeping first-occurrence order) and drops zeros.
inline std::vector<LinearTerm> MergeTerms(std::vector<LinearTerm> terms) {
  std::vector<LinearTerm> merged;
  std::unordered_map<int, size_t> slot;
  for (const LinearTerm& t : terms) {
    auto [it, fresh] = slot.emplace(t.var, merged.size());
    if (fresh) {
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  std::erase_if(merged, [](const LinearTerm& t) { return t.coef == 0.0; });
  return merged;
}

inline double Activity(std::span<const LinearTerm> terms,
                       std::span<const double> x) {
  double sum = 0.0;
  for (const LinearTerm& t : terms) sum += t.coef * x[t.var];
  return sum;
}

// Amount by which `x` violates `c` (0 when satisfied).
inline double Violation(const LinearConstraint& c, std::span<const double> x) {
  const double lhs = Activity(c.terms, x);
  switch (c.relation) {
    case Relation::kLessEqual: return std::max(0.0, lhs - c.rhs);
    case Relation::kGreaterEqual: return std::max(0.0, c.rhs - lhs);
    case Relation::kEqual: return std::abs(lhs - c.rhs);
  }
  return 0.0;
}

class MipModel {
 public:
  int AddVariable(std::string name, double lower, double upper,
                  bool is_binary = false) {
    variables_.push_back({std::move(name), lower, upper, is_binary});
    return static_cast<int>(variables_.size()) - 1;
  }
  int AddBinary(std::string name) {
    return AddVariable(std::move(name), 0.0, 1.0, true);
  }

  void AddConstraint(LinearConstraint c) {
    c.terms = MergeTerms(std::move(c.terms));
    constraints_.push_back(std::move(c));
  }
  void AddConstraint(std::string name, std::vector<LinearTerm> terms,
                     Relation relation, double rhs) {
    AddConstraint(LinearConstraint{std::move(name), std::move(terms), relation,
                                   rhs});
  }

  void SetObjective(Sense sense, std::vector<LinearTerm> terms) {
    sense_ = sense;
    objective_ = MergeTerms(std::move(terms));
  }

  void SetBounds(int var, double lower, double upper) {
    variables_[var].lower = lower;
    variables_[var].upper = upper;
  }

  Sense sense() const { return sense_; }
  std::span<const LinearTerm> objective() const { return objective_; }
  std::span<const Variable> variables() const { return variables_; }
  std::span<const LinearConstraint> constraints() const { return constraints_; }
  const Variable& variable(int i) const { return variables_[i]; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }

  std::optional<int> FindVariable(std::string_view name) const {
    for (int i = 0; i < num_variables(); ++i) {
      if (variables_[i].name == name) return i;
    }
    return std::nullopt;
  }

  double ObjectiveValue(std::span<const double> x) const {
    return Activity(objective_, x);
  }

  // Largest bound or row violation of `x`.
  double MaxViolation(std::span<const double> x) const {
    double worst = 0.0;
    for (int i = 0; i < num_variables(); ++i) {
      worst = std::max({worst, variables_[i].lower - x[i],
                        x[i] - variables_[i].upper});
    }
    for (const LinearConstraint& c : constraints_) {
      worst = std::max(worst, Violation(c, x));
    }
    return worst;
  }

  void Validate() const {
    for (const Variable& v : variables_) {
      if (!std::isfinite(v.lower) || !std::isfinite(v.upper) ||
          v.lower > v.upper) {
        Fail(ErrorCode::kInvalidArgument,
             "variable " + v.name + " needs finite bounds with lo <= hi");
      }
      if (v.is_binary && (v.lower < 0.0 || v.upper > 1.0)) {
        Fail(ErrorCode::kInvalidArgument,
             "binary variable " + v.name + " has bounds outside [0,1]");
      }
    }
    auto check_terms = [&](std::span<const LinearTerm> terms,
                           const std::string& where) {
      for (const LinearTerm& t : terms) {
        if (t.var < 0 || t.var >= num_variables() || !std::isfinite(t.coef)) {
          Fail(ErrorCode::kInvalidArgument, "bad term in " + where);
        }
      }
    };
    check_terms(objective_, "objective");
    for (const LinearConstraint& c : constraints_) {
      check_terms(c.terms, "row " + c.name);
      if (!std::isfinite(c.rhs)) {
        Fail(ErrorCode::kInvalidArgument, "row " + c.name + " has a bad rhs");
      }
    }
  }

 private:
  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  Sense sense_ = Sense::kMaximize;
  std::vector<LinearTerm> objective_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kTimeLimit };

inline std::string_view StatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kTimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  // Present iff a feasible point was found.
  std::vector<double> incumbent;
  double primal_value = std::nan("");
  double dual_bound = std::nan("");
  double gap = kInfinity;
  int64_t nodes = 0;
  double runtime_seconds = 0.0;
  // LP bound at the root, after any separation rounds.
  double root_bound = std::nan("");
  int64_t cuts_added = 0;
  int64_t simplex_iterations = 0;

  bool has_incumbent() const { return !incumbent.empty(); }
};

inline double RelativeGap(double bound, double value) {
  return std::abs(bound - value) / std::max(std::abs(value), kEps);
}

// Returns rows violated by the given point; an empty result accepts it.
using CutSeparator =
    std::function<std::vector<LinearConstraint>(std::span<const double>)>;

struct MipParams {
  double time_limit_seconds = 300.0;
  double gap_tolerance = 1e-6;
  CutSeparator separator;
  // Separation rounds per node while the LP point is fractional. Integral
  // points are always separated to completion.
  int max_cut_rounds = 50;
};

namespace internal {

// Dense bounded dual simplex minimizing cost^T x. Columns are the model
// variables followed by one slack per row, s_r = rhs_r - a_r x.
class DualSimplex {
 public:
  static constexpr double kFeasibilityTol = 1e-7;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr int kDegenerateSwitch = 1000;
  static constexpr size_t kMaxTableauEntries = 60'000'000;

  explicit DualSimplex(const MipModel& model) : n_(model.num_variables()) {
    model.Validate();
    const int m = model.num_constraints();
    if (static_cast<size_t>(m) * static_cast<size_t>(n_ + m) >
        kMaxTableauEntries) {
      Fail(ErrorCode::kInstanceTooLarge,
           "model with " + std::to_string(m) + " rows and " +
               std::to_string(n_) + " columns exceeds the dense simplex limit");
    }
    const double sign = model.sense() == Sense::kMaximize ? -1.0 : 1.0;
    cost_.assign(n_, 0.0);
    for (const LinearTerm& t : model.objective()) cost_[t.var] += sign * t.coef;
    lo_.resize(n_);
    hi_.resize(n_);
    x_.resize(n_);
    at_upper_.assign(n_, 0);
    pos_.assign(n_, -1);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = model.variable(j).lower;
      hi_[j] = model.variable(j).upper;
      at_upper_[j] = cost_[j] < 0.0 && hi_[j] > lo_[j];
      x_[j] = at_upper_[j] ? hi_[j] : lo_[j];
    }
    d_ = cost_;
    for (const LinearConstraint& c : model.constraints()) AddRow(c);
  }

  int num_structurals() const { return n_; }
  int num_rows() const { return static_cast<int>(basis_.size()); }
  int64_t iterations() const { return iterations_; }
  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return hi_[j]; }

  void SetBounds(int j, double lo, double hi) {
    lo_[j] = lo;
    hi_[j] = hi;
    if (pos_[j] >= 0) return;
    bool upper_side;
    if (lo == hi) {
      upper_side = false;
    } else if (d_[j] > kDualTol) {
      upper_side = false;
    } else if (d_[j] < -kDualTol) {
      upper_side = true;
    } else {
      upper_side = at_upper_[j];
    }
    at_upper_[j] = upper_side;
    const double target = upper_side ? hi : lo;
    const double delta = target - x_[j];
    if (delta != 0.0) {
      for (size_t i = 0; i < basis_.size(); ++i) {
        const double a = tab_[i][j];
        if (a != 0.0) x_[basis_[i]] -= a * delta;
      }
      x_[j] = target;
    }
  }

  // Appends a row with its slack basic; the basis stays dual feasible.
  void AddRow(const LinearConstraint& c) {
    const int col = static_cast<int>(cost_.size());
    for (auto& row : tab_) row.push_back(0.0);
    cost_.push_back(0.0);
    d_.push_back(0.0);
    switch (c.relation) {
      case Relation::kLessEqual:
        lo_.push_back(0.0);
        hi_.push_back(kInfinity);
        break;
      case Relation::kGreaterEqual:
        lo_.push_back(-kInfinity);
        hi_.push_back(0.0);
        break;
      case Relation::kEqual:
        lo_.push_back(0.0);
        hi_.push_back(0.0);
        break;
    }
    at_upper_.push_back(0);

    std::vector<double> t(col + 1, 0.0);
    double value = c.rhs;
    for (const LinearTerm& term : c.terms) {
      t[term.var] += term.coef;
      value -= term.coef * x_[term.var];
    }
    t[col] = 1.0;
    double beta = c.rhs;
    for (size_t i = 0; i < basis_.size(); ++i) {
      const double f = t[basis_[i]];
      if (f == 0.0) continue;
      const std::vector<double>& row = tab_[i];
      for (int j = 0; j <= col; ++j) {
        if (row[j] != 0.0) t[j] -= f * row[j];
      }
      t[basis_[i]] = 0.0;
      beta -= f * beta_[i];
    }
    x_.push_back(value);
    pos_.push_back(static_cast<int>(basis_.size()));
    basis_.push_back(col);
    tab_.push_back(std::move(t));
    beta_.push_back(beta);
    rows_.push_back(c);
  }

  // Reoptimizes from the current basis. Returns false when the bounds and
  // rows admit no feasible point.
  bool Solve() {
    RecomputeBasics();
    int degenerate_run = 0;
    bool bland = false;
    const int64_t limit =
        200'000 + 50 * static_cast<int64_t>(cost_.size() + basis_.size());
    for (int64_t local = 0;; ++local) {
      if (local > limit) {
        Fail(ErrorCode::kNumericalFailure, "simplex pivot limit exhausted");
      }
      const int r = ChooseLeavingRow(bland);
      if (r < 0) return true;
      const int leave = basis_[r];
      const bool to_lower = x_[leave] < lo_[leave];
      const double target = to_lower ? lo_[leave] : hi_[leave];
      const int q = ChooseEnteringColumn(r, to_lower, bland);
      if (q < 0) return false;
      const double theta = d_[q] / tab_[r][q];
      if (std::abs(theta) < 1e-12) {
        if (++degenerate_run > kDegenerateSwitch) bland = true;
      } else {
        degenerate_run = 0;
      }
      Pivot(r, q, target, !to_lower);
      ++iterations_;
    }
  }

  std::vector<double> StructuralValues() const {
    return std::vector<double>(x_.begin(), x_.begin() + n_);
  }

  // Minimization-form objective.
  double Objective() const {
    double sum = 0.0;
    for (int j = 0; j < n_; ++j) sum += cost_[j] * x_[j];
    return sum;
  }

  // y^T b + sum over nonbasic columns of d_j x_j, with y_r = -d(slack_r).
  double DualObjective() const {
    double sum = 0.0;
    for (size_t r = 0; r < rows_.size(); ++r) {
      sum -= d_[n_ + r] * rows_[r].rhs;
    }
    for (size_t j = 0; j < cost_.size(); ++j) {
      if (pos_[j] < 0 && d_[j] != 0.0 && std::isfinite(x_[j])) {
        sum += d_[j] * x_[j];
      }
    }
    return sum;
  }

 private:
  void RecomputeBasics() {
    for (size_t i = 0; i < basis_.size(); ++i) {
      double v = beta_[i];
      const std::vector<double>& row = tab_[i];
      for (size_t j = 0; j < cost_.size(); ++j) {
        if (pos_[j] < 0 && row[j] != 0.0) v -= row[j] * x_[j];
      }
      x_[basis_[i]] = v;
    }
  }

  int ChooseLeavingRow(bool bland) const {
    int best_row = -1;
    double best = 0.0;
    int best_col = 0;
    for (size_t i = 0; i < basis_.size(); ++i) {
      const int col = basis_[i];
      const double v = x_[col];
      const double infeas = std::max(lo_[col] - v, v - hi_[col]);
      const double tol =
          kFeasibilityTol *
          (1.0 + std::min(std::abs(v), 1e6));
      if (infeas <= tol) continue;
      if (bland) {
        if (best_row < 0 || col < best_col) {
          best_row = static_cast<int>(i);
          best_col = col;
        }
      } else if (infeas > best) {
        best = infeas;
        best_row = static_cast<int>(i);
      }
    }
    return best_row;
  }

  int ChooseEnteringColumn(int r, bool increase, bool bland) const {
    const std::vector<double>& row = tab_[r];
    int best_col = -1;
    double best_ratio = kInfinity;
    double best_abs = 0.0;
    for (size_t j = 0; j < cost_.size(); ++j) {
      if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
      const double a = row[j];
      if (std::abs(a) <= kPivotTol) continue;
      const bool up = at_upper_[j];
      // Moving j off its bound must push the leaving variable toward the
      // violated bound.
      const bool eligible = increase ? ((!up && a < 0) || (up && a > 0))
                                     : ((!up && a > 0) || (up && a < 0));
      if (!eligible) continue;
      const double dj = up ? std::max(0.0, -d_[j]) : std::max(0.0, d_[j]);
      const double ratio = dj / std::abs(a);
      if (best_col < 0 || ratio < best_ratio - 1e-12) {
        best_col = static_cast<int>(j);
        best_ratio = ratio;
        best_abs = std::abs(a);
      } else if (ratio <= best_ratio + 1e-12 && !bland &&
                 std::abs(a) > best_abs) {
        best_col = static_cast<int>(j);
        best_ratio = std::min(best_ratio, ratio);
        best_abs = std::abs(a);
      }
    }
    return best_col;
  }

  void Pivot(int r, int q, double target, bool leave_at_upper) {
    const int leave = basis_[r];
    std::vector<double>& prow = tab_[r];
    const double a = prow[q];

    const double delta_q = (x_[leave] - target) / a;
    for (size_t i = 0; i < basis_.size(); ++i) {
      if (static_cast<int>(i) == r) continue;
      const double f = tab_[i][q];
      if (f != 0.0) x_[basis_[i]] -= f * delta_q;
    }
    x_[q] += delta_q;
    x_[leave] = target;
    at_upper_[leave] = leave_at_upper && hi_[leave] != lo_[leave];
    at_upper_[q] = 0;

    nonzeros_.clear();
    for (size_t j = 0; j < prow.size(); ++j) {
      if (prow[j] != 0.0) nonzeros_.push_back(static_cast<int>(j));
    }
    const double theta = d_[q] / a;
    if (theta != 0.0) {
      for (int j : nonzeros_) d_[j] -= theta * prow[j];
    }
    d_[q] = 0.0;

    const double inv = 1.0 / a;
    for (int j : nonzeros_) prow[j] *= inv;
    prow[q] = 1.0;
    beta_[r] *= inv;
    for (size_t i = 0; i < basis_.size(); ++i) {
      if (static_cast<int>(i) == r) continue;
      std::vector<double>& row = tab_[i];
      const double f = row[q];
      if (f == 0.0) continue;
      for (int j : nonzeros_) row[j] -= f * prow[j];
      row[q] = 0.0;
      beta_[i] -= f * beta_[r];
    }
    pos_[leave] = -1;
    pos_[q] = r;
    basis_[r] = q;
  }

  int n_;
  std::vector<std::vector<double>> tab_;
  std::vector<double> beta_;
  std::vector<double> cost_;
  std::vector<double> d_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  std::vector<uint8_t> at_upper_;
  std::vector<int> basis_;
  std::vector<int> pos_;
  std::vector<LinearConstraint> rows_;
  std::vector<int> nonzeros_;
  int64_t iterations_ = 0;
};

inline double Elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace internal

// Solves the continuous relaxation; the incumbent is a basic (vertex)
// solution.
inline SolveResult SolveLp(const MipModel& model) {
  const auto start = std::chrono::steady_clock::now();
  internal::DualSimplex lp(model);
  SolveResult result;
  const double sign = model.sense() == Sense::kMaximize ? -1.0 : 1.0;
  if (lp.Solve()) {
    result.status = SolveStatus::kOptimal;
    result.incumbent = lp.StructuralValues();
    result.primal_value = model.ObjectiveValue(result.incumbent);
    result.dual_bound = sign * lp.DualObjective();
    result.gap = RelativeGap(result.dual_bound, result.primal_value);
    result.root_bound = result.primal_value;
  } else {
    result.status = SolveStatus::kInfeasible;
  }
  result.simplex_iterations = lp.iterations();
  result.runtime_seconds = internal::Elapsed(start);
  return result;
}

// Best-bound branch and bound over the binary variables. Branches on the most
// fractional binary (ties: smallest index). Cuts returned by
// params.separator are added globally.
inline SolveResult SolveMip(const MipModel& model, const MipParams& params = {}) {
  const auto start = std::chrono::steady_clock::now();
  constexpr double kIntTol = 1e-6;
  const double sign = model.sense() == Sense::kMaximize ? -1.0 : 1.0;
  internal::DualSimplex lp(model);

  std::vector<int> binaries;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).is_binary) binaries.push_back(j);
  }
  bool integral_objective = true;
  for (const LinearTerm& t : model.objective()) {
    if (!model.variable(t.var).is_binary ||
        std::abs(t.coef - std::round(t.coef)) > 1e-9) {
      integral_objective = false;
    }
  }

  std::vector<LinearConstraint> cuts;
  SolveResult result;
  double incumbent_value = kInfinity;  // minimization form

  auto is_integral = [&](std::span<const double> x) {
    for (int j : binaries) {
      if (std::abs(x[j] - std::round(x[j])) > kIntTol) return false;
    }
    return true;
  };
  auto can_improve = [&](double bound) {
    if (!std::isfinite(incumbent_value)) return true;
    if (integral_objective) {
      return std::ceil(bound - 1e-6) <= incumbent_value - 1.0 + 1e-9;
    }
    return (incumbent_value - bound) /
               std::max(std::abs(incumbent_value), kEps) >
           params.gap_tolerance;
  };
  auto separate = [&](std::span<const double> x) {
    std::vector<LinearConstraint> found = params.separator(x);
    for (LinearConstraint& c : found) {
      c.terms = MergeTerms(std::move(c.terms));
      lp.AddRow(c);
      cuts.push_back(std::move(c));
    }
    result.cuts_added += static_cast<int64_t>(found.size());
    return !found.empty();
  };
  // Solves the LP under the current bounds, separating as configured.
  auto solve_lp = [&]() -> bool {
    for (int round = 0;; ++round) {
      if (!lp.Solve()) return false;
      if (!params.separator) return true;
      const std::vector<double> x = lp.StructuralValues();
      const bool integral = is_integral(x);
      if (!integral && round >= params.max_cut_rounds) return true;
      if (!separate(x)) return true;
    }
  };
  auto offer_incumbent = [&](std::vector<double> x) {
    double worst = model.MaxViolation(x);
    for (const LinearConstraint& c : cuts) worst = std::max(worst, Violation(c, x));
    if (worst > 1e-5) return;
    for (int j : binaries) x[j] = std::round(x[j]);
    const double value = sign * model.ObjectiveValue(x);
    if (value < incumbent_value - 1e-12) {
      incumbent_value = value;
      result.incumbent = std::move(x);
    }
  };
  auto apply_fixings = [&](const std::vector<std::pair<int, double>>& fixed) {
    for (int j : binaries) {
      lp.SetBounds(j, model.variable(j).lower, model.variable(j).upper);
    }
    for (const auto& [j, v] : fixed) lp.SetBounds(j, v, v);
  };
  auto finish = [&](SolveStatus status, double bound_min_form) {
    result.status = status;
    if (result.has_incumbent()) {
      result.primal_value = sign * incumbent_value;
      result.dual_bound = sign * std::min(bound_min_form, incumbent_value);
      if (status == SolveStatus::kOptimal) result.dual_bound = result.primal_value;
      result.gap = RelativeGap(result.dual_bound, result.primal_value);
    } else if (std::isfinite(bound_min_form)) {
      result.dual_bound = sign * bound_min_form;
    }
    result.simplex_iterations = lp.iterations();
    result.runtime_seconds = internal::Elapsed(start);
    return result;
  };

  result.nodes = 1;
  if (!solve_lp()) return finish(SolveStatus::kInfeasible, kInfinity);
  const double root = lp.Objective();
  result.root_bound = sign * root;

  {
    // LP rounding for a first incumbent: nearest, then floor.
    const std::vector<double> x = lp.StructuralValues();
    if (is_integral(x)) {
      offer_incumbent(x);
    } else {
      for (int mode = 0; mode < 2; ++mode) {
        std::vector<std::pair<int, double>> fixed;
        for (int j : binaries) {
          const double v = mode == 0 ? std::round(x[j]) : std::floor(x[j] + kIntTol);
          fixed.emplace_back(j, std::clamp(v, model.variable(j).lower,
                                           model.variable(j).upper));
        }
        apply_fixings(fixed);
        if (solve_lp()) offer_incumbent(lp.StructuralValues());
      }
      apply_fixings({});
    }
  }

  struct Node {
    double bound;
    int64_t id;
    std::vector<std::pair<int, double>> fixed;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  int64_t next_id = 0;
  open.push(Node{root, next_id++, {}});
  bool first = true;

  while (!open.empty()) {
    if (!can_improve(open.top().bound)) break;
    if (internal::Elapsed(start) > params.time_limit_seconds) {
      return finish(SolveStatus::kTimeLimit, open.top().bound);
    }
    Node node = open.top();
    open.pop();
    if (!first) {
      ++result.nodes;
      apply_fixings(node.fixed);
      if (!solve_lp()) continue;
    } else {
      apply_fixings({});
      if (!solve_lp()) continue;
      first = false;
    }
    const double value = lp.Objective();
    if (!can_improve(value)) continue;
    const std::vector<double> x = lp.StructuralValues();

    int branch = -1;
    double best_frac = kIntTol;
    for (int j : binaries) {
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      offer_incumbent(x);
      continue;
    }
    for (double v : {0.0, 1.0}) {
      Node child{value, next_id++, node.fixed};
      child.fixed.emplace_back(branch, v);
      open.push(std::move(child));
    }
  }
  if (!result.has_incumbent()) {
    return finish(SolveStatus::kInfeasible, kInfinity);
  }
  return finish(SolveStatus::kOptimal, incumbent_value);
}

// ---------------------------------------------------------------------------
// LP text format.

namespace internal {

inline std::string FormatNumber(double v) {
  if (v == 0.0) return "0";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline std::string SanitizeName(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || (out[0] >= '0' && out[0] <= '9')) out.insert(0, "v");
  return out;
}

// Sanitized names, made unique with numeric suffixes.
inline std::vector<std::string> UniqueNames(
    const std::vector<std::string>& raw) {
  std::set<std::string> used;
  std::vector<std::string> out;
  out.reserve(raw.size());
  for (const std::string& r : raw) {
    std::string base = SanitizeName(r);
    std::string name = base;
    for (int k = 2; used.count(name) > 0; ++k) {
      name = base + "_" + std::to_string(k);
    }
    used.insert(name);
    out.push_back(std::move(name));
  }
  return out;
}

inline std::string FormatExpression(std::span<const LinearTerm> terms,
                                    const std::vector<std::string>& names) {
  if (terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const LinearTerm& t : terms) {
    const double mag = std::abs(t.coef);
    if (first) {
      if (t.coef < 0) out += "- ";
    } else {
      out += t.coef < 0 ? " - " : " + ";
    }
    if (mag != 1.0) out += FormatNumber(mag) + " ";
    out += names[t.var];
    first = false;
  }
  return out;
}

}  // namespace internal

inline std::string FormatLp(const MipModel& model) {
  std::vector<std::string> raw_vars;
  for (const Variable& v : model.variables()) raw_vars.push_back(v.name);
  const std::vector<std::string> vars = internal::UniqueNames(raw_vars);
  std::vector<std::string> raw_rows;
  for (const LinearConstraint& c : model.constraints()) raw_rows.push_back(c.name);
  const std::vector<std::string> rows = internal::UniqueNames(raw_rows);

  std::ostringstream out;
  out << "\\ anchorsched model\n";
  out << (model.sense() == Sense::kMaximize ? "Maximize\n" : "Minimize\n");
  out << " obj: " << internal::FormatExpression(model.objective(), vars) << "\n";
  out << "Subject To\n";
  for (int r = 0; r < model.num_constraints(); ++r) {
    const LinearConstraint& c = model.constraints()[r];
    const char* rel = c.relation == Relation::kLessEqual      ? "<="
                      : c.relation == Relation::kGreaterEqual ? ">="
                                                              : "=";
    out << " " << rows[r] << ": " << internal::FormatExpression(c.terms, vars)
        << " " << rel << " " << internal::FormatNumber(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    if (v.is_binary && v.lower == 0.0 && v.upper == 1.0) continue;
    out << " " << internal::FormatNumber(v.lower) << " <= " << vars[j]
        << " <= " << internal::FormatNumber(v.upper) << "\n";
  }
  bool any_binary = false;
  for (const Variable& v : model.variables()) any_binary |= v.is_binary;
  if (any_binary) {
    out << "Binary\n";
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variable(j).is_binary) out << " " << vars[j] << "\n";
    }
  }
  out << "End\n";
  return out.str();
}

inline void ExportLpFile(const MipModel& model,
                         const std::filesystem::path& destination) {
  std::ofstream file(destination);
  if (!file) {
    Fail(ErrorCode::kIoError, "cannot open " + destination.string());
  }
  file << FormatLp(model);
  if (!file) {
    Fail(ErrorCode::kIoError, "write failed for " + destination.string());
  }
}

// Reads the subset of the LP format written by FormatLp. Variables keep the
// order in which they first appear in the Bounds/Binary sections, then in
// rows.
inline MipModel ParseLp(std::string_view text) {
  enum class Section { kNone, kObjective, kRows, kBounds, kBinary, kEnd };
  std::vector<std::string> lines;
  {
    std::string current;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(current);
        current.clear();
      } else if (c != '\r') {
        current.push_back(c);
      }
    }
    if (!current.empty()) lines.push_back(current);
  }
  auto fail = [](size_t line, const std::string& msg) {
    Fail(ErrorCode::kParseError, "line " + std::to_string(line + 1) + ": " + msg);
  };
  auto tokenize = [](std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : s) {
      if (c == ' ' || c == '\t') {
        if (!cur.empty()) tokens.push_back(cur), cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
  };
  auto parse_number = [](const std::string& tok, double* out) {
    if (tok == "+inf" || tok == "inf" || tok == "+infinity") {
      *out = kInfinity;
      return true;
    }
    if (tok == "-inf" || tok == "-infinity") {
      *out = -kInfinity;
      return true;
    }
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (!tok.empty() && tok[0] == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, *out);
    return ec == std::errc() && ptr == e;
  };

  struct PendingVar {
    double lower = 0.0;
    double upper = kInfinity;
    bool is_binary = false;
    bool has_bounds = false;
  };
  std::vector<std::string> declared_order;
  std::vector<std::string> row_order;
  std::unordered_map<std::string, PendingVar> vars;
  std::unordered_map<std::string, bool> declared;
  auto touch = [&](const std::string& name, bool declaration) -> PendingVar& {
    auto it = vars.find(name);
    if (it == vars.end()) {
      it = vars.emplace(name, PendingVar{}).first;
      row_order.push_back(name);
    }
    if (declaration && !declared[name]) {
      declared[name] = true;
      declared_order.push_back(name);
    }
    return it->second;
  };

  struct PendingRow {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    Relation relation;
    double rhs;
  };
  Sense sense = Sense::kMaximize;
  std::vector<std::pair<std::string, double>> objective;
  std::vector<PendingRow> rows;

  // Parses "[name:] expr [rel rhs]" token lists.
  auto parse_expression = [&](size_t ln, const std::vector<std::string>& tokens,
                              size_t from, size_t to,
                              std::vector<std::pair<std::string, double>>* out) {
    double sign = 1.0;
    double coef = 1.0;
    bool pending_sign = false;
    bool pending_coef = false;
    for (size_t k = from; k < to; ++k) {
      const std::string& tok = tokens[k];
      if (tok == "+" || tok == "-") {
        if (pending_coef) fail(ln, "operator after a coefficient");
        if (tok == "-") sign = -sign;
        pending_sign = true;
        continue;
      }
      double v = 0.0;
      if (parse_number(tok, &v)) {
        if (pending_coef) fail(ln, "two coefficients in a row");
        coef = v;
        pending_coef = true;
        continue;
      }
      out->emplace_back(tok, sign * coef);
      touch(tok, false);
      sign = 1.0;
      coef = 1.0;
      pending_sign = false;
      pending_coef = false;
    }
    if (pending_sign) fail(ln, "dangling operator");
    // A lone constant 0 is how an empty objective is written.
    if (pending_coef && !(coef == 0.0 && out->empty())) {
      fail(ln, "dangling constant");
    }
  };

  Section section = Section::kNone;
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (const size_t c = line.find('\\'); c != std::string_view::npos) {
      line = line.substr(0, c);
    }
    std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    std::string head = tokens[0];
    std::transform(head.begin(), head.end(), head.begin(), ::tolower);
    if (tokens.size() == 1 && (head == "maximize" || head == "minimize")) {
      sense = head == "maximize" ? Sense::kMaximize : Sense::kMinimize;
      section = Section::kObjective;
      continue;
    }
    if (tokens.size() == 2 && head == "subject") {
      section = Section::kRows;
      continue;
    }
    if (tokens.size() == 1 && head == "bounds") {
      section = Section::kBounds;
      continue;
    }
    if (tokens.size() == 1 && (head == "binary" || head == "binaries")) {
      section = Section::kBinary;
      continue;
    }
    if (tokens.size() == 1 && head == "end") {
      section = Section::kEnd;
      continue;
    }
    switch (section) {
      case Section::kNone:
      case Section::kEnd:
        fail(ln, "content outside a section");
        break;
      case Section::kObjective: {
        size_t from = 0;
        if (tokens[0].back() == ':') from = 1;
        parse_expression(ln, tokens, from, tokens.size(), &objective);
        break;
      }
      case Section::kRows: {
        if (tokens[0].back() != ':') fail(ln, "row without a name");
        PendingRow row;
        row.name = tokens[0].substr(0, tokens[0].size() - 1);
        size_t rel = tokens.size();
        for (size_t k = 1; k < tokens.size(); ++k) {
          if (tokens[k] == "<=" || tokens[k] == ">=" || tokens[k] == "=") {
            rel = k;
            break;
          }
        }
        if (rel + 2 != tokens.size()) fail(ln, "expected 'expr rel rhs'");
        row.relation = tokens[rel] == "<="   ? Relation::kLessEqual
                       : tokens[rel] == ">=" ? Relation::kGreaterEqual
                                             : Relation::kEqual;
        if (!parse_number(tokens[rel + 1], &row.rhs)) fail(ln, "bad rhs");
        parse_expression(ln, tokens, 1, rel, &row.terms);
        rows.push_back(std::move(row));
        break;
      }
      case Section::kBounds: {
        double lo, hi;
        if (tokens.size() == 5 && tokens[1] == "<=" && tokens[3] == "<=" &&
            parse_number(tokens[0], &lo) && parse_number(tokens[4], &hi)) {
          PendingVar& v = touch(tokens[2], true);
          v.lower = lo;
          v.upper = hi;
          v.has_bounds = true;
        } else if (tokens.size() == 3 && parse_number(tokens[2], &lo)) {
          PendingVar& v = touch(tokens[0], true);
          if (tokens[1] == ">=") {
            v.lower = lo;
          } else if (tokens[1] == "<=") {
            v.upper = lo;
          } else if (tokens[1] == "=") {
            v.lower = v.upper = lo;
          } else {
            fail(ln, "bad bound");
          }
          v.has_bounds = true;
        } else {
          fail(ln, "bad bound");
        }
        break;
      }
      case Section::kBinary:
        for (const std::string& tok : tokens) {
          PendingVar& v = touch(tok, true);
          v.is_binary = true;
          if (!v.has_bounds) {
            v.lower = 0.0;
            v.upper = 1.0;
          }
        }
        break;
    }
  }

  MipModel model;
  std::unordered_map<std::string, int> index;
  std::vector<std::string> order = declared_order;
  for (const std::string& name : row_order) {
    if (!declared[name]) order.push_back(name);
  }
  for (const std::string& name : order) {
    const PendingVar& v = vars[name];
    index[name] = model.AddVariable(name, v.lower, v.upper, v.is_binary);
  }
  auto to_terms = [&](const std::vector<std::pair<std::string, double>>& in) {
    std::vector<LinearTerm> terms;
    for (const auto& [name, coef] : in) terms.push_back({index[name], coef});
    return terms;
  };
  model.SetObjective(sense, to_terms(objective));
  for (const PendingRow& row : rows) {
    model.AddConstraint(row.name, to_terms(row.terms), row.relation, row.rhs);
  }
  return model;
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_MILP_H_
