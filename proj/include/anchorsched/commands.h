#ifndef ANCHORSCHED_COMMANDS_H_
#define ANCHORSCHED_COMMANDS_H_

// Implementation of the command-line subcommands: generate, solve, bench and
// verify. Each returns a process exit code:
//   0 success, 1 other failure, 2 infeasible (or verification failed),
//   3 unsupported method or instance, 4 parse error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "anchorsched/anchored.h"
#include "anchorsched/common.h"
#include "anchorsched/exact.h"
#include "anchorsched/formulations.h"
#include "anchorsched/instance_io.h"
#include "anchorsched/instances.h"
#include "anchorsched/milp.h"

namespace anchorsched {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitUnsupported = 3;
inline constexpr int kExitParseError = 4;

inline int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDeadlineInfeasible:
    case ErrorCode::kInfeasibleAnchoredSet:
      return kExitInfeasible;
    case ErrorCode::kUnsupportedUncertainty:
    case ErrorCode::kUnsupportedInstance:
    case ErrorCode::kInstanceTooLarge:
    case ErrorCode::kNotCritical:
    case ErrorCode::kEnumerationTooLarge:
      return kExitUnsupported;
    case ErrorCode::kParseError:
      return kExitParseError;
    default:
      return kExitFailure;
  }
}

// Seed from the flag, else from ANCHORSCHED_SEED, else 0.
inline uint64_t ResolveSeed(std::optional<uint64_t> flag) {
  if (flag.has_value()) return *flag;
  if (const char* env = std::getenv("ANCHORSCHED_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      Fail(ErrorCode::kParseError, "ANCHORSCHED_SEED is not an integer");
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::string label;
  int n = 40;
  int count = 10;
  uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
};

inline std::filesystem::path InstanceFileName(const std::string& label, int n,
                                              int index) {
  std::ostringstream name;
  name << label << "_n" << n << "_" << std::setw(3) << std::setfill('0') << index
       << ".json";
  return name.str();
}

// Instance k of a batch uses seed MixSeed(seed, k).
inline std::vector<std::filesystem::path> GenerateBatch(
    const GenerateOptions& options) {
  const InstanceClass c = ParseLabel(options.label);
  if (options.count < 0) Fail(ErrorCode::kInvalidArgument, "count must be >= 0");
  std::vector<std::filesystem::path> written;
  if (options.count == 0) return written;
  std::filesystem::create_directories(options.out_dir);
  for (int k = 0; k < options.count; ++k) {
    const Instance inst =
        GenerateInstance(c, options.n, MixSeed(options.seed, static_cast<uint64_t>(k)));
    const auto path = options.out_dir / InstanceFileName(options.label, options.n, k);
    WriteInstance(inst, path);
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// solve

struct MethodOptions {
  double time_limit_seconds = 300.0;
  bool chvatal = false;
  bool cuts = false;
};

struct MethodOutcome {
  std::string method;
  // Solver actually used (differs from `method` for auto).
  std::string route;
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<AnchoredSolution> solution;
  double objective = std::nan("");
  double bound = std::nan("");
  double gap = std::nan("");
  double seconds = 0.0;
  int64_t nodes = 0;
  // LP bound at the root after separation (cuts mode only).
  std::optional<double> root_bound;
};

inline std::optional<Formulation> ParseFormulation(std::string_view method) {
  if (method == "std") return Formulation::kStd;
  if (method == "dom") return Formulation::kDom;
  if (method == "lay") return Formulation::kLay;
  return std::nullopt;
}

inline void CheckMethod(std::string_view method) {
  if (method != "std" && method != "dom" && method != "lay" &&
      method != "auto" && method != "brute") {
    Fail(ErrorCode::kParseError, "unknown method '" + std::string(method) +
                                     "' (std|dom|lay|auto|brute)");
  }
}

inline MethodOutcome FromFormulationResult(std::string method, std::string route,
                                           const FormulationResult& r) {
  MethodOutcome out;
  out.method = std::move(method);
  out.route = std::move(route);
  out.status = r.mip.status;
  out.solution = r.solution;
  out.objective = r.mip.primal_value;
  out.bound = r.mip.dual_bound;
  out.gap = r.mip.gap;
  out.seconds = r.mip.runtime_seconds;
  out.nodes = r.mip.nodes;
  return out;
}

inline MethodOutcome RunMethod(const Instance& inst, std::string_view method,
                               const MethodOptions& options) {
  CheckMethod(method);
  ValidateInstance(inst);
  FormulationSolveOptions solve_options;
  solve_options.model.chvatal = options.chvatal;
  solve_options.cuts = options.cuts;
  solve_options.params.time_limit_seconds = options.time_limit_seconds;

  if (method == "brute") {
    const auto start = std::chrono::steady_clock::now();
    MethodOutcome out;
    out.method = out.route = "brute";
    out.solution = BruteForceOptimum(inst);
    out.status = SolveStatus::kOptimal;
    out.objective = out.bound = out.solution->objective;
    out.gap = 0.0;
    out.seconds = internal::Elapsed(start);
    return out;
  }
  if (method == "auto") {
    const AutoResult r = SolveAuto(inst, solve_options);
    return FromFormulationResult("auto", std::string(ExactRouteName(r.route)),
                                 r.result);
  }
  const Formulation f = *ParseFormulation(method);
  const PathMatrices paths = ComputePathMatrices(inst);
  if (f == Formulation::kLay) LayeredBudget(inst);
  if (options.cuts && f == Formulation::kStd) {
    Fail(ErrorCode::kUnsupportedInstance, "cut mode needs dom or lay");
  }
  const FormulationResult r = SolveFormulation(inst, paths, f, solve_options);
  MethodOutcome out =
      FromFormulationResult(std::string(method), std::string(method), r);
  if (options.cuts) out.root_bound = r.mip.root_bound;
  return out;
}

inline Json OutcomeToJson(const MethodOutcome& o) {
  auto number = [](double v) -> Json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  Json j;
  j["method"] = o.method;
  j["route"] = o.route;
  j["status"] = std::string(StatusName(o.status));
  j["objective"] = number(o.objective);
  j["bound"] = number(o.bound);
  j["gap"] = number(o.gap);
  j["time"] = o.seconds;
  j["nodes"] = o.nodes;
  if (o.root_bound.has_value()) j["root_bound"] = number(*o.root_bound);
  if (o.solution.has_value()) {
    j["anchored"] = o.solution->anchored;
    j["schedule"] = o.solution->schedule.start;
  } else {
    j["anchored"] = nullptr;
    j["schedule"] = nullptr;
  }
  return j;
}

struct SolveCommandOptions {
  std::filesystem::path instance;
  std::string method = "auto";
  MethodOptions method_options;
  std::optional<std::filesystem::path> export_lp;
  std::optional<std::filesystem::path> output;
};

inline int RunSolve(const SolveCommandOptions& options, std::ostream& out) {
  CheckMethod(options.method);
  const Instance inst = ReadInstance(options.instance);
  ValidateInstance(inst);
  if (options.export_lp.has_value()) {
    const PathMatrices paths = ComputePathMatrices(inst);
    const Formulation f =
        ParseFormulation(options.method).value_or(Formulation::kDom);
    FormulationOptions fo;
    fo.chvatal = options.method_options.chvatal;
    ExportLpFile(BuildFormulation(f, inst, paths, fo).model, *options.export_lp);
  }
  const MethodOutcome outcome =
      RunMethod(inst, options.method, options.method_options);
  Json record = OutcomeToJson(outcome);
  const std::string text = record.dump(2) + "\n";
  out << text;
  if (options.output.has_value()) {
    if (outcome.solution.has_value()) {
      internal::WriteTextFile(*options.output,
                              SolutionToJson(*outcome.solution).dump(2) + "\n");
    } else {
      internal::WriteTextFile(*options.output, text);
    }
  }
  return outcome.status == SolveStatus::kInfeasible ? kExitInfeasible : kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyReport {
  bool schedule_ok = false;
  bool deadline_ok = false;
  bool anchored_ok = false;
  // Set when the extreme points of the set could be enumerated.
  std::optional<bool> recourse_ok;
  std::optional<size_t> scenarios_checked;

  bool passed() const {
    return schedule_ok && deadline_ok && anchored_ok && recourse_ok.value_or(true);
  }
};

inline VerifyReport VerifySolution(const Instance& inst,
                                   const AnchoredSolution& sol) {
  VerifyReport report;
  const PrecedenceGraph& g = inst.graph;
  report.schedule_ok = IsSchedule(g, sol.schedule);
  report.deadline_ok = sol.schedule.makespan() <= inst.deadline + kEps;
  if (!report.schedule_ok) return report;
  const LongestPathMatrix worst = WorstCaseLongestPaths(g, inst.uncertainty);
  report.anchored_ok = IsXAnchored(g, worst, sol.schedule, sol.anchored);
  try {
    bool ok = true;
    size_t count = 0;
    ForEachExtremePoint(inst.uncertainty, g.num_jobs(),
                        [&](std::span<const double> delta) {
                          ++count;
                          if (ok && !RecourseFeasible(g, delta, sol.schedule,
                                                      sol.anchored)) {
                            ok = false;
                          }
                        });
    report.recourse_ok = ok;
    report.scenarios_checked = count;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEnumerationTooLarge) throw;
  }
  return report;
}

inline int RunVerify(const std::filesystem::path& instance_path,
                     const std::filesystem::path& solution_path,
                     std::ostream& out) {
  const Instance inst = ReadInstance(instance_path);
  ValidateInstance(inst);
  const AnchoredSolution sol = ReadSolution(solution_path, inst.num_jobs());
  const VerifyReport r = VerifySolution(inst, sol);
  auto line = [&](std::string_view what, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << what << "\n";
  };
  line("schedule respects precedences", r.schedule_ok);
  line("makespan within deadline", r.deadline_ok);
  line("anchored set is schedule-anchored", r.anchored_ok);
  if (r.recourse_ok.has_value()) {
    line("recourse exists for all " + std::to_string(*r.scenarios_checked) +
             " extreme deviations",
         *r.recourse_ok);
  } else {
    out << "SKIP extreme-deviation recourse check (set too large to enumerate)\n";
  }
  out << (r.passed() ? "verdict: pass\n" : "verdict: fail\n");
  return r.passed() ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::filesystem::path class_dir;
  std::vector<std::string> methods = {"dom"};
  MethodOptions method_options;
  int jobs = 1;
  bool pretty = false;
};

struct BenchRow {
  std::string label;
  std::string method;
  int instances = 0;
  int solved_count = 0;
  std::optional<double> mean_time_solved_s;
  std::optional<double> mean_final_gap_unsolved;
  std::optional<double> mean_lpgap;
  std::optional<double> mean_opt;
  std::optional<double> root_gap_after_cuts;
};

struct BenchInstanceResult {
  bool solved = false;
  double seconds = 0.0;
  std::optional<double> final_gap;
  std::optional<double> optimum;
  std::optional<double> lpgap;
  std::optional<double> root_gap;
};

// (b - opt) / opt, with the denominator guarded like the MIP gap.
inline double LpGap(double bound, double optimum) {
  return (bound - optimum) / std::max(std::abs(optimum), kEps);
}

inline BenchInstanceResult BenchOne(const Instance& inst,
                                    const std::string& method,
                                    const MethodOptions& options) {
  BenchInstanceResult r;
  try {
    const MethodOutcome o = RunMethod(inst, method, options);
    r.seconds = o.seconds;
    r.solved = o.status == SolveStatus::kOptimal;
    if (!r.solved) {
      if (std::isfinite(o.gap)) r.final_gap = o.gap;
      return r;
    }
    r.optimum = o.objective;
    if (const auto f = ParseFormulation(method)) {
      const PathMatrices paths = ComputePathMatrices(inst);
      FormulationOptions fo;
      fo.chvatal = options.chvatal;
      r.lpgap = LpGap(LpBound(inst, paths, *f, fo), o.objective);
    }
    if (o.root_bound.has_value()) r.root_gap = LpGap(*o.root_bound, o.objective);
  } catch (const Error&) {
    r.solved = false;
  }
  return r;
}

inline std::vector<BenchRow> RunBenchRows(const BenchOptions& options) {
  for (const std::string& m : options.methods) CheckMethod(m);
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(options.class_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(options.class_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
  } else {
    Fail(ErrorCode::kIoError, "not a directory: " + options.class_dir.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<Instance> instances;
  std::map<std::string, std::vector<size_t>> by_label;
  for (const auto& f : files) {
    instances.push_back(ReadInstance(f));
    by_label[instances.back().meta.label].push_back(instances.size() - 1);
  }

  struct Task {
    size_t instance;
    size_t method;
  };
  std::vector<Task> tasks;
  for (const auto& [label, ids] : by_label) {
    for (size_t m = 0; m < options.methods.size(); ++m) {
      for (size_t id : ids) tasks.push_back({id, m});
    }
  }
  std::vector<BenchInstanceResult> results(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < tasks.size(); k = next++) {
      results[k] = BenchOne(instances[tasks[k].instance],
                            options.methods[tasks[k].method],
                            options.method_options);
    }
  };
  const int workers = std::max(1, options.jobs);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  std::vector<BenchRow> rows;
  size_t k = 0;
  for (const auto& [label, ids] : by_label) {
    for (size_t m = 0; m < options.methods.size(); ++m) {
      BenchRow row;
      row.label = label;
      row.method = options.methods[m];
      row.instances = static_cast<int>(ids.size());
      std::vector<double> times, gaps, lpgaps, opts, roots;
      for (size_t i = 0; i < ids.size(); ++i, ++k) {
        const BenchInstanceResult& r = results[k];
        if (r.solved) {
          ++row.solved_count;
          times.push_back(r.seconds);
          if (r.optimum) opts.push_back(*r.optimum);
          if (r.lpgap) lpgaps.push_back(*r.lpgap);
          if (r.root_gap) roots.push_back(*r.root_gap);
        } else if (r.final_gap) {
          gaps.push_back(*r.final_gap);
        }
      }
      row.mean_time_solved_s = mean(times);
      row.mean_final_gap_unsolved = mean(gaps);
      row.mean_lpgap = mean(lpgaps);
      row.mean_opt = mean(opts);
      row.root_gap_after_cuts = mean(roots);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::vector<std::string> BenchHeader(bool cuts) {
  std::vector<std::string> h = {"label",
                                "method",
                                "solved_count",
                                "mean_time_solved_s",
                                "mean_final_gap_unsolved",
                                "mean_lpgap",
                                "mean_opt"};
  if (cuts) h.push_back("root_gap_after_cuts");
  return h;
}

inline std::vector<std::string> BenchCells(const BenchRow& row, bool cuts) {
  auto cell = [](const std::optional<double>& v) -> std::string {
    if (!v.has_value()) return "";
    std::ostringstream s;
    s << std::setprecision(6) << *v;
    return s.str();
  };
  std::vector<std::string> c = {row.label,
                                row.method,
                                std::to_string(row.solved_count),
                                cell(row.mean_time_solved_s),
                                cell(row.mean_final_gap_unsolved),
                                cell(row.mean_lpgap),
                                cell(row.mean_opt)};
  if (cuts) c.push_back(cell(row.root_gap_after_cuts));
  return c;
}

inline void WriteBenchTable(const std::vector<BenchRow>& rows, bool cuts,
                            bool pretty, std::ostream& out) {
  std::vector<std::vector<std::string>> table{BenchHeader(cuts)};
  for (const BenchRow& row : rows) table.push_back(BenchCells(row, cuts));
  if (!pretty) {
    for (const auto& line : table) {
      for (size_t c = 0; c < line.size(); ++c) out << (c ? "," : "") << line[c];
      out << "\n";
    }
    return;
  }
  std::vector<size_t> width(table.front().size(), 0);
  for (const auto& line : table) {
    for (size_t c = 0; c < line.size(); ++c) {
      width[c] = std::max(width[c], line[c].empty() ? 1 : line[c].size());
    }
  }
  for (const auto& line : table) {
    for (size_t c = 0; c < line.size(); ++c) {
      const std::string v = line[c].empty() ? "-" : line[c];
      out << (c ? "  " : "") << std::setw(static_cast<int>(width[c]))
          << (c < 2 ? std::left : std::right) << v;
    }
    out << "\n";
  }
}

inline int RunBench(const BenchOptions& options, std::ostream& out) {
  const std::vector<BenchRow> rows = RunBenchRows(options);
  WriteBenchTable(rows, options.method_options.cuts, options.pretty, out);
  return kExitOk;
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_COMMANDS_H_
