#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "surfclust/evalmetrics.hpp"
#include "surfclust/matkmeans.hpp"
#include "surfclust/tensorfit.hpp"

namespace surfclust {

struct MixtureComponent {
  double weight = 1.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

using Mixture = std::vector<MixtureComponent>;

/// Σ_k w_k N((x, y); μ_k, Σ_k).
double mixture_density(std::span<const MixtureComponent> components, double x, double y);

int scenario_cluster_count(int scenario);

/// Cluster-center density of a simulation scenario (1-based cluster index).
/// Scenario 1: f1 (c-free), f2. Scenario 2: f3 (c-free), f4, f5.
Mixture scenario_center(int scenario, int cluster, double c);

struct ScenarioConfig {
  int scenario = 1;
  double c = 1.0;
  std::vector<int> n_per_cluster;
  int grid_points_per_axis = 20;
  double domain_lo = -5.0;
  double domain_hi = 5.0;
  std::vector<double> noise_sd;
  int runs = 50;
  std::uint64_t seed = 1;
  int degree = 3;
  int interior_knots = 6;
  int n_random_inits = 50;
  int max_iter = kDefaultMaxIter;
  int threads = 1;

  /// 30+30 surfaces with noise 0.015 / 0.01 for scenario 1, 20+20+20 with 0.015 for scenario 2.
  static ScenarioConfig defaults(int scenario);

  /// Throws invalid_config.
  void validate() const;
  int cluster_count() const { return static_cast<int>(n_per_cluster.size()); }
  int surface_count() const;
};

/// lo + j (hi − lo) / G for j = 1..G.
std::vector<double> grid_axis(const ScenarioConfig& config);

/// Clamped spec whose knots span the observed grid range [axis.front(), axis.back()].
SpecPtr fitting_spec(const ScenarioConfig& config);

struct Dataset {
  std::vector<SurfaceSamples> surfaces;
  /// 0-based true cluster per surface.
  std::vector<int> truth;
};

/// Every surface is sampled on the full grid cross product, x index outer and y
/// index inner, with i.i.d. N(0, σ²) noise of its cluster's σ.
Dataset generate_dataset(const ScenarioConfig& config, std::uint64_t run_seed);

/// Raw observations as m x 1 matrices, ordered by (x, y). Throws grid_mismatch
/// unless every surface is observed at the same locations.
std::vector<Matrix> raw_vectors(std::span<const SurfaceSamples> surfaces);

/// k-means on raw_vectors with the same candidate-selected initialization as the proposed method.
std::vector<int> benchmark_raw_kmeans(std::span<const SurfaceSamples> surfaces, int K, std::uint64_t seed,
                                      int n_random = 50, int max_iter = kDefaultMaxIter);

/// Fit every surface with the shared spec pair, then cluster the coefficient matrices.
std::vector<int> proposed_kmeans(std::span<const SurfaceSamples> surfaces, int K, const SpecPtr& spec_x,
                                 const SpecPtr& spec_y, std::uint64_t seed, int n_random = 50,
                                 int max_iter = kDefaultMaxIter);

struct MethodReport {
  std::string method;
  RunErrors errors;
  ErrorAggregate aggregate;
  /// Σ errors / B, which equals φ·ν.
  double mean_misclustered = 0.0;
};

struct FailedRun {
  int run = 0;
  std::string error;
};

struct McReport {
  ScenarioConfig config;
  MethodReport proposed;
  MethodReport benchmark;
  /// Indices of runs that completed; per_run entries follow this order.
  std::vector<int> runs;
  std::vector<FailedRun> failed;
  double seconds = 0.0;
};

/// B independent runs; run b draws from derive_seed(config.seed, stream, b), so the
/// report does not depend on config.threads.
McReport run_monte_carlo(const ScenarioConfig& config);

struct ConvergenceRow {
  std::size_t size = 0;
  std::vector<double> distances;
  double median = 0.0;
  /// Redrawn sample sets (rank-deficient designs) for this size.
  int redraws = 0;
};

struct CoefficientConvergenceOptions {
  Mixture target = scenario_center(1, 1, 1.0);
  double noise_sd = 0.015;
  std::size_t reference_size = 50'000;
  double domain_lo = -5.0;
  double domain_hi = 5.0;
  int degree = 3;
  int interior_knots = 6;
};

/// For each m in sizes, ‖Θ̂_m − Θ̂_ref‖_F over reps replicates of i.i.d. uniform
/// locations, where Θ̂_ref is one fit with reference_size samples.
std::vector<ConvergenceRow> coefficient_convergence(std::span<const std::size_t> sizes, int reps,
                                                    std::uint64_t seed,
                                                    const CoefficientConvergenceOptions& options = {});

struct CenterConsistencyOptions {
  /// Component centers of the coefficient-matrix mixture; empty means the noiseless
  /// scenario-1 fits of f1 and f2 at c = 3 on the default grid.
  std::vector<Matrix> centers;
  std::vector<double> weights{0.5, 0.5};
  /// Per-entry standard deviation around each center.
  double spread = 0.01;
  /// Size of the independent sample that defines the reference centers; 0 means the largest size.
  std::size_t reference_size = 0;
  int n_random_inits = 50;
};

/// For each n in sizes, hausdorff(c^n, c^ref) over reps replicates.
std::vector<ConvergenceRow> center_consistency(std::span<const std::size_t> sizes, int reps, std::uint64_t seed,
                                               const CenterConsistencyOptions& options = {});

double median(std::vector<double> values);

}  // namespace surfclust
