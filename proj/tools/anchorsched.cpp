// Command-line front end: generate, solve, bench, verify.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anchorsched/commands.h"

namespace {

using anchorsched::Error;

struct MethodFlags {
  double time_limit = 300.0;
  bool chvatal = false;
  bool cuts = false;

  void Register(CLI::App* app) {
    app->add_option("--time-limit", time_limit, "Solver time limit in seconds")
        ->check(CLI::PositiveNumber);
    app->add_flag("--chvatal", chvatal, "Add rounded deadline rows");
    app->add_flag("--cuts", cuts,
                  "Solve over anchoring variables with separated chain rows");
  }

  anchorsched::MethodOptions Options() const {
    return {time_limit, chvatal, cuts};
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchor-robust project scheduling solver"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Write random instances");
  std::string label;
  int n = 40;
  int count = 10;
  std::optional<uint64_t> seed;
  std::string out_dir = ".";
  generate->add_option("--class", label, "Class label, e.g. ER_pRand_dRand_G1")
      ->required();
  generate->add_option("--n", n, "Number of jobs")->check(CLI::PositiveNumber);
  generate->add_option("--count", count, "Number of instances")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", seed,
                       "Base seed (default: $ANCHORSCHED_SEED, else 0)");
  generate->add_option("--output,-o", out_dir, "Output directory");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  std::string instance_path;
  std::string method = "auto";
  std::string export_lp;
  std::string output;
  MethodFlags solve_flags;
  solve->add_option("instance", instance_path, "Instance JSON file")->required();
  solve->add_option("--method", method, "std|dom|lay|auto|brute")
      ->check(CLI::IsMember({"std", "dom", "lay", "auto", "brute"}));
  solve_flags.Register(solve);
  solve->add_option("--export-lp", export_lp, "Write the model in LP format");
  solve->add_option("--output,-o", output, "Write the solution JSON here");

  // bench
  auto* bench = app.add_subcommand("bench", "Solve a directory of instances");
  std::string class_dir;
  std::vector<std::string> methods = {"dom"};
  int jobs = 1;
  bool pretty = false;
  MethodFlags bench_flags;
  bench->add_option("dir", class_dir, "Directory of instance JSON files")
      ->required();
  bench->add_option("--methods", methods, "Methods to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"std", "dom", "lay", "auto", "brute"}));
  bench->add_option("--jobs,-j", jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--pretty", pretty, "Aligned table instead of CSV");
  bench_flags.Register(bench);

  // verify
  auto* verify = app.add_subcommand("verify", "Check a solution");
  std::string verify_instance;
  std::string verify_solution;
  verify->add_option("instance", verify_instance, "Instance JSON file")
      ->required();
  verify->add_option("solution", verify_solution, "Solution JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : anchorsched::kExitParseError;
  }

  try {
    if (*generate) {
      anchorsched::GenerateOptions options;
      options.label = label;
      options.n = n;
      options.count = count;
      options.seed = anchorsched::ResolveSeed(seed);
      options.out_dir = out_dir;
      for (const auto& path : anchorsched::GenerateBatch(options)) {
        std::cout << path.string() << "\n";
      }
      return anchorsched::kExitOk;
    }
    if (*solve) {
      anchorsched::SolveCommandOptions options;
      options.instance = instance_path;
      options.method = method;
      options.method_options = solve_flags.Options();
      if (!export_lp.empty()) options.export_lp = export_lp;
      if (!output.empty()) options.output = output;
      return anchorsched::RunSolve(options, std::cout);
    }
    if (*bench) {
      anchorsched::BenchOptions options;
      options.class_dir = class_dir;
      options.methods = methods;
      options.method_options = bench_flags.Options();
      options.jobs = jobs;
      options.pretty = pretty;
      return anchorsched::RunBench(options, std::cout);
    }
    if (*verify) {
      return anchorsched::RunVerify(verify_instance, verify_solution, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << anchorsched::ErrorCodeName(e.code()) << ": "
              << e.what() << "\n";
    return anchorsched::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return anchorsched::kExitFailure;
  }
  return anchorsched::kExitFailure;
}
