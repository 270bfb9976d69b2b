#ifndef ANCHORSCHED_INSTANCE_IO_H_
#define ANCHORSCHED_INSTANCE_IO_H_

// JSON serialization of instances and solutions.
//
// Instance: {"n", "arcs" ([tail, head], 0 = s, n + 1 = t), "p", "weights",
// "deadline", "uncertainty" {"type", ...}, "meta" {"label", "seed", "prng"
// [, "notes"]}}. Unknown keys are rejected.
// Solution: {"schedule" (n + 2 start times), "anchored" (job ids)
// [, "objective"]}.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "anchorsched/anchored.h"
#include "anchorsched/common.h"
#include "anchorsched/graph.h"
#include "anchorsched/uncertainty.h"
#include "json.hpp"

namespace anchorsched {

using Json = nlohmann::ordered_json;

namespace internal {

[[noreturn]] inline void FieldError(std::string_view field,
                                    std::string_view message) {
  Fail(ErrorCode::kParseError,
       "field '" + std::string(field) + "': " + std::string(message));
}

inline void CheckKeys(const Json& obj, std::string_view where,
                      std::initializer_list<std::string_view> required,
                      std::initializer_list<std::string_view> optional = {}) {
  if (!obj.is_object()) FieldError(where, "expected an object");
  for (std::string_view key : required) {
    if (!obj.contains(key)) {
      FieldError(std::string(where) + "." + std::string(key), "missing");
    }
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view k : required) known |= k == key;
    for (std::string_view k : optional) known |= k == key;
    if (!known) FieldError(std::string(where) + "." + key, "unknown field");
  }
}

inline double GetReal(const Json& v, const std::string& field) {
  if (!v.is_number()) FieldError(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) FieldError(field, "must be finite");
  return d;
}

inline int64_t GetInt(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) FieldError(field, "expected an integer");
  return v.get<int64_t>();
}

inline std::vector<double> GetReals(const Json& v, const std::string& field,
                                    size_t size, bool nonnegative) {
  if (!v.is_array()) FieldError(field, "expected an array");
  if (v.size() != size) {
    FieldError(field, "expected " + std::to_string(size) + " entries, got " +
                          std::to_string(v.size()));
  }
  std::vector<double> out;
  for (size_t k = 0; k < v.size(); ++k) {
    const std::string at = field + "[" + std::to_string(k) + "]";
    const double d = GetReal(v[k], at);
    if (nonnegative && d < 0.0) FieldError(at, "must be >= 0");
    out.push_back(d);
  }
  return out;
}

inline std::vector<int> GetInts(const Json& v, const std::string& field) {
  if (!v.is_array()) FieldError(field, "expected an array");
  std::vector<int> out;
  for (size_t k = 0; k < v.size(); ++k) {
    out.push_back(static_cast<int>(GetInt(v[k], field + "[" + std::to_string(k) + "]")));
  }
  return out;
}

inline Json ParseJsonText(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into a line and column.
    size_t line = 1;
    size_t column = 1;
    const size_t stop = std::min<size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    Fail(ErrorCode::kParseError, "line " + std::to_string(line) + ", column " +
                                     std::to_string(column) + ": " + e.what());
  }
}

inline Json BudgetedToJson(const BudgetedSet& s) {
  Json j;
  j["type"] = "budgeted";
  j["dhat"] = s.dhat;
  j["gamma"] = s.gamma;
  return j;
}

inline BudgetedSet BudgetedFromJson(const Json& j, const std::string& where,
                                    int n) {
  CheckKeys(j, where, {"type", "dhat", "gamma"});
  if (j["type"] != "budgeted") FieldError(where + ".type", "expected budgeted");
  return BudgetedSet{GetReals(j["dhat"], where + ".dhat", n, true),
                     static_cast<int>(GetInt(j["gamma"], where + ".gamma"))};
}

inline Json UncertaintyToJson(const UncertaintySet& set) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        Json j;
        if constexpr (std::is_same_v<T, BoxSet>) {
          j["type"] = "box";
          j["dhat"] = s.dhat;
        } else if constexpr (std::is_same_v<T, BudgetedSet>) {
          j = BudgetedToJson(s);
        } else if constexpr (std::is_same_v<T, OneDisruptionSet>) {
          j["type"] = "one_disruption";
          j["dhat0"] = s.dhat0;
        } else if constexpr (std::is_same_v<T, PartitionBudgetedSet>) {
          j["type"] = "partition";
          j["dhat"] = s.dhat;
          j["parts"] = s.parts;
          j["gammas"] = s.gammas;
        } else if constexpr (std::is_same_v<T, MixedBudgetedSet>) {
          j["type"] = "mixed";
          j["components"] = Json::array();
          for (const BudgetedSet& c : s.components) {
            j["components"].push_back(BudgetedToJson(c));
          }
        } else {
          j["type"] = "scenarios";
          j["deltas"] = s.deltas;
        }
        return j;
      },
      set);
}

inline UncertaintySet UncertaintyFromJson(const Json& j, int n) {
  const std::string where = "uncertainty";
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    FieldError(where + ".type", "missing or not a string");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "box") {
    CheckKeys(j, where, {"type", "dhat"});
    return BoxSet{GetReals(j["dhat"], where + ".dhat", n, true)};
  }
  if (type == "budgeted") return BudgetedFromJson(j, where, n);
  if (type == "one_disruption") {
    CheckKeys(j, where, {"type", "dhat0"});
    const double d = GetReal(j["dhat0"], where + ".dhat0");
    if (d < 0.0) FieldError(where + ".dhat0", "must be >= 0");
    return OneDisruptionSet{d};
  }
  if (type == "partition") {
    CheckKeys(j, where, {"type", "dhat", "parts", "gammas"});
    PartitionBudgetedSet s;
    s.dhat = GetReals(j["dhat"], where + ".dhat", n, true);
    if (!j["parts"].is_array()) FieldError(where + ".parts", "expected an array");
    for (size_t k = 0; k < j["parts"].size(); ++k) {
      s.parts.push_back(
          GetInts(j["parts"][k], where + ".parts[" + std::to_string(k) + "]"));
    }
    s.gammas = GetInts(j["gammas"], where + ".gammas");
    return s;
  }
  if (type == "mixed") {
    CheckKeys(j, where, {"type", "components"});
    if (!j["components"].is_array()) {
      FieldError(where + ".components", "expected an array");
    }
    MixedBudgetedSet s;
    for (size_t k = 0; k < j["components"].size(); ++k) {
      s.components.push_back(BudgetedFromJson(
          j["components"][k], where + ".components[" + std::to_string(k) + "]",
          n));
    }
    return s;
  }
  if (type == "scenarios") {
    CheckKeys(j, where, {"type", "deltas"});
    if (!j["deltas"].is_array()) FieldError(where + ".deltas", "expected an array");
    ScenarioSet s;
    for (size_t k = 0; k < j["deltas"].size(); ++k) {
      s.deltas.push_back(GetReals(j["deltas"][k],
                                  where + ".deltas[" + std::to_string(k) + "]",
                                  n, true));
    }
    return s;
  }
  FieldError(where + ".type", "unknown uncertainty type '" + type + "'");
}

inline std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream out;
  out << file.rdbuf();
  return out.str();
}

inline void WriteTextFile(const std::filesystem::path& path,
                          std::string_view text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  file << text;
  if (!file) Fail(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace internal

inline Json InstanceToJson(const Instance& inst) {
  const PrecedenceGraph& g = inst.graph;
  Json j;
  j["n"] = g.num_jobs();
  j["arcs"] = Json::array();
  for (const Arc& a : g.arcs()) j["arcs"].push_back({a.tail, a.head});
  j["p"] = g.processing_times();
  j["weights"] = inst.weights;
  j["deadline"] = inst.deadline;
  j["uncertainty"] = internal::UncertaintyToJson(inst.uncertainty);
  Json meta;
  meta["label"] = inst.meta.label;
  meta["seed"] = inst.meta.seed;
  meta["prng"] = inst.meta.prng;
  if (!inst.meta.notes.empty()) meta["notes"] = inst.meta.notes;
  j["meta"] = meta;
  return j;
}

inline std::string FormatInstance(const Instance& inst) {
  return InstanceToJson(inst).dump(2) + "\n";
}

inline Instance InstanceFromJson(const Json& j) {
  using internal::FieldError;
  internal::CheckKeys(
      j, "instance",
      {"n", "arcs", "p", "weights", "deadline", "uncertainty", "meta"});
  const int64_t n = internal::GetInt(j["n"], "n");
  if (n < 0 || n > 1'000'000) FieldError("n", "out of range");
  if (!j["arcs"].is_array()) FieldError("arcs", "expected an array");
  std::vector<Arc> arcs;
  for (size_t k = 0; k < j["arcs"].size(); ++k) {
    const std::string at = "arcs[" + std::to_string(k) + "]";
    const Json& a = j["arcs"][k];
    if (!a.is_array() || a.size() != 2) FieldError(at, "expected [tail, head]");
    const int64_t tail = internal::GetInt(a[0], at);
    const int64_t head = internal::GetInt(a[1], at);
    if (tail < 0 || tail > n + 1 || head < 0 || head > n + 1) {
      FieldError(at, "vertex out of range 0.." + std::to_string(n + 1));
    }
    arcs.push_back({static_cast<Vertex>(tail), static_cast<Vertex>(head)});
  }
  const auto p = internal::GetReals(j["p"], "p", n, true);
  Instance inst;
  try {
    inst.graph = PrecedenceGraph(static_cast<int>(n), std::move(arcs), p);
  } catch (const Error& e) {
    FieldError("arcs", e.what());
  }
  inst.weights = internal::GetReals(j["weights"], "weights", n, true);
  inst.deadline = internal::GetReal(j["deadline"], "deadline");
  if (inst.deadline < 0.0) FieldError("deadline", "must be >= 0");
  inst.uncertainty = internal::UncertaintyFromJson(j["uncertainty"], static_cast<int>(n));
  try {
    ValidateUncertainty(inst.uncertainty, static_cast<int>(n));
  } catch (const Error& e) {
    FieldError("uncertainty", e.what());
  }
  const Json& meta = j["meta"];
  internal::CheckKeys(meta, "meta", {"label", "seed", "prng"}, {"notes"});
  if (!meta["label"].is_string()) FieldError("meta.label", "expected a string");
  if (!meta["prng"].is_string()) FieldError("meta.prng", "expected a string");
  if (!meta["seed"].is_number_integer()) FieldError("meta.seed", "expected an integer");
  inst.meta.label = meta["label"].get<std::string>();
  inst.meta.prng = meta["prng"].get<std::string>();
  inst.meta.seed = meta["seed"].is_number_unsigned()
                       ? meta["seed"].get<uint64_t>()
                       : static_cast<uint64_t>(meta["seed"].get<int64_t>());
  if (meta.contains("notes")) {
    if (!meta["notes"].is_string()) FieldError("meta.notes", "expected a string");
    inst.meta.notes = meta["notes"].get<std::string>();
  }
  return inst;
}

inline Instance ParseInstance(std::string_view text) {
  return InstanceFromJson(internal::ParseJsonText(text));
}

inline Instance ReadInstance(const std::filesystem::path& path) {
  return ParseInstance(internal::ReadTextFile(path));
}

inline void WriteInstance(const Instance& inst,
                          const std::filesystem::path& path) {
  internal::WriteTextFile(path, FormatInstance(inst));
}

inline Json SolutionToJson(const AnchoredSolution& sol) {
  Json j;
  j["schedule"] = sol.schedule.start;
  j["anchored"] = sol.anchored;
  j["objective"] = sol.objective;
  return j;
}

// The schedule must have one entry per vertex of a graph with n jobs.
inline AnchoredSolution SolutionFromJson(const Json& j, int n) {
  internal::CheckKeys(j, "solution", {"schedule", "anchored"}, {"objective"});
  AnchoredSolution sol;
  sol.schedule.start = internal::GetReals(j["schedule"], "schedule", n + 2, false);
  sol.anchored = internal::GetInts(j["anchored"], "anchored");
  std::set<int> seen;
  for (int v : sol.anchored) {
    if (v < 1 || v > n || !seen.insert(v).second) {
      internal::FieldError("anchored", "job ids must be distinct in 1.." +
                                           std::to_string(n));
    }
  }
  std::sort(sol.anchored.begin(), sol.anchored.end());
  if (j.contains("objective")) {
    sol.objective = internal::GetReal(j["objective"], "objective");
  }
  return sol;
}

inline AnchoredSolution ReadSolution(const std::filesystem::path& path, int n) {
  return SolutionFromJson(internal::ParseJsonText(internal::ReadTextFile(path)), n);
}

}  // namespace anchorsched

#endif  // ANCHORSCHED_INSTANCE_IO_H_
