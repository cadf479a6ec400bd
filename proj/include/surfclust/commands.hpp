#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "surfclust/io.hpp"

namespace surfclust {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

struct FitArgs {
  std::filesystem::path input;
  std::filesystem::path output;
  int degree = 3;
  int interior_knots = 6;
};

struct ClusterArgs {
  std::filesystem::path input;
  std::filesystem::path output;
  int k = 2;
  std::uint64_t seed = 1;
  int n_random_inits = 50;
  int max_iter = kDefaultMaxIter;
};

struct SimulateArgs {
  int scenario = 1;
  std::vector<double> c{1.0};
  int runs = 50;
  std::uint64_t seed = 1;
  int degree = 3;
  int interior_knots = 6;
  /// Overrides every cluster's noise level when set.
  std::optional<double> noise_sd;
  int threads = 1;
  std::filesystem::path output;
};

struct EvaluateArgs {
  std::filesystem::path pred;
  std::filesystem::path truth;
  std::filesystem::path output;
};

struct GenerateArgs {
  int scenario = 1;
  double c = 1.0;
  std::uint64_t seed = 1;
  std::optional<double> noise_sd;
  std::filesystem::path output;
  std::filesystem::path truth_output;
};

/// Each command writes its outputs atomically plus a `<output>.manifest.json`
/// (or `manifest.json` inside the simulate output directory) holding every
/// argument, so `cmd_rerun` can replay it. Returns an ExitCode.
int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
int cmd_cluster(const ClusterArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_rerun(const std::filesystem::path& manifest, std::ostream& out, std::ostream& err);

Json to_json(const FitArgs& args);
Json to_json(const ClusterArgs& args);
Json to_json(const SimulateArgs& args);
Json to_json(const EvaluateArgs& args);
Json to_json(const GenerateArgs& args);

ScenarioConfig scenario_config(const SimulateArgs& args, double c);

}  // namespace surfclust
