// surfclust: fit noisy surfaces with tensor-product B-splines and cluster the
// coefficient matrices; also runs the simulation benchmark against raw k-means.

#include <iostream>

#include <CLI11.hpp>

#include "surfclust/commands.hpp"

int main(int argc, char** argv) {
  using namespace surfclust;

  CLI::App app{"Tensor-product B-spline surface clustering"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit every surface of a surface_id,x,y,z CSV");
  fit_cmd->add_option("--input", fit.input, "Surface CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--output", fit.output, "Coefficient JSON")->required();
  fit_cmd->add_option("--degree", fit.degree, "Spline degree per axis")->capture_default_str()->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--interior-knots", fit.interior_knots, "Interior knots per axis")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means over fitted coefficient matrices");
  cluster_cmd->add_option("--input", cluster.input, "Coefficient JSON from 'fit'")->required()->check(CLI::ExistingFile);
  cluster_cmd->add_option("--output", cluster.output, "Cluster report JSON")->required();
  cluster_cmd->add_option("--k", cluster.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--seed", cluster.seed, "Seed for the random initializations")->capture_default_str();
  cluster_cmd->add_option("--random-inits", cluster.n_random_inits, "Random-pick initialization candidates")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cluster_cmd->add_option("--max-iter", cluster.max_iter, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);

  SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo comparison against raw-data k-means");
  sim_cmd->add_option("--scenario", simulate.scenario, "Scenario")->capture_default_str()->check(CLI::IsMember({1, 2}));
  sim_cmd->add_option("--c", simulate.c, "Covariance multiplier(s)")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--runs", simulate.runs, "Monte Carlo runs per c")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", simulate.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--degree", simulate.degree, "Spline degree per axis")->capture_default_str()->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--interior-knots", simulate.interior_knots, "Interior knots per axis")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--noise-sd", simulate.noise_sd, "Noise level for every cluster (default: scenario's)")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--threads", simulate.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--output", simulate.output, "Output directory")->required();

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Permutation-matched mis-specification of predicted labels");
  eval_cmd->add_option("--pred", evaluate.pred, "Predicted labels (CSV or cluster report)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", evaluate.truth, "True labels (CSV)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--output", evaluate.output, "Result JSON");

  GenerateArgs generate;
  auto* gen_cmd = app.add_subcommand("generate", "Write one simulated data set as a surface CSV");
  gen_cmd->add_option("--scenario", generate.scenario, "Scenario")->capture_default_str()->check(CLI::IsMember({1, 2}));
  gen_cmd->add_option("--c", generate.c, "Covariance multiplier")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", generate.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--noise-sd", generate.noise_sd, "Noise level for every cluster")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--output", generate.output, "Surface CSV")->required();
  gen_cmd->add_option("--truth", generate.truth_output, "True label CSV");

  std::filesystem::path manifest;
  auto* rerun_cmd = app.add_subcommand("rerun", "Replay a command from its manifest");
  rerun_cmd->add_option("manifest", manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*fit_cmd) return cmd_fit(fit, std::cout, std::cerr);
  if (*cluster_cmd) return cmd_cluster(cluster, std::cout, std::cerr);
  if (*sim_cmd) return cmd_simulate(simulate, std::cout, std::cerr);
  if (*eval_cmd) return cmd_evaluate(evaluate, std::cout, std::cerr);
  if (*gen_cmd) return cmd_generate(generate, std::cout, std::cerr);
  if (*rerun_cmd) return cmd_rerun(manifest, std::cout, std::cerr);
  return kExitUsage;
}
