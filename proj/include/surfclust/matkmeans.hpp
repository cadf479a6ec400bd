#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace surfclust {

using Matrix = Eigen::MatrixXd;

double frobenius_distance(const Matrix& a, const Matrix& b);

/// Symmetric n x n matrix of Frobenius distances.
Eigen::MatrixXd pairwise_distances(std::span<const Matrix> data);

enum class InitMethod {
  random_entries,        // (a) entries uniform over the range of all data entries
  farthest_pair_greedy,  // (b) farthest pair, then max average distance to the chosen
  k_center_greedy,       // (c) K-subset of the data minimizing total nearest distance
  random_pick,           // (d) K distinct data matrices at random
  preclustered,          // (e) centers supplied by the caller
};

std::string_view to_string(InitMethod method);
std::optional<InitMethod> parse_init_method(std::string_view name);

/// Starting centers for k-means and how they were obtained.
struct InitChoice {
  InitMethod method = InitMethod::preclustered;
  std::uint64_t seed = 0;
  std::vector<Matrix> centers;
  /// Data indices of the centers for the data-derived methods (b), (c), (d).
  std::vector<std::size_t> indices;
  /// Search strategy used, e.g. "exhaustive" or "swap-search" for method (c).
  std::string note;
};

InitChoice init_random_entries(std::span<const Matrix> data, int K, std::uint64_t seed);
InitChoice init_farthest_pair(std::span<const Matrix> data, int K);
InitChoice init_min_total_distance(std::span<const Matrix> data, int K,
                                   std::uint64_t max_exhaustive_subsets = 1'000'000);
InitChoice init_random_pick(std::span<const Matrix> data, int K, std::uint64_t seed);
InitChoice init_preclustered(std::span<const Matrix> data, std::vector<Matrix> centers);

/// The 53-way candidate menu: (b), (c), n_random draws of (d), then one draw of (a).
std::vector<InitChoice> init_candidates(std::span<const Matrix> data, int K, std::uint64_t seed,
                                        int n_random = 50);

/// Mean distance from each datum to its nearest center.
double mean_nearest_distance(std::span<const Matrix> data, std::span<const Matrix> centers);

/// Index of the candidate with the smallest mean_nearest_distance; first wins ties.
std::size_t select_init_index(std::span<const Matrix> data, std::span<const InitChoice> candidates);
InitChoice select_init(std::span<const Matrix> data, std::span<const InitChoice> candidates);

struct ClusterModel {
  std::vector<Matrix> centers;
  /// 0-based center index per datum.
  std::vector<int> labels;
  /// (1/n) Σ_i min_c ‖Θ^i − c‖_F.
  double objective = 0.0;
  /// (1/n) Σ_i ‖Θ^i − c_{label(i)}‖_F², the quantity each Lloyd step cannot increase.
  double mean_squared_distance = 0.0;
  /// Number of center updates performed.
  int iterations = 0;
  bool converged = false;
  /// mean_squared_distance and objective recorded after every assignment and every update.
  std::vector<double> potential_trace;
  std::vector<double> objective_trace;
};

inline constexpr int kDefaultMaxIter = 300;

/// Lloyd iteration from the given centers: nearest-center assignment (ties to the
/// lowest index) alternating with center = member mean, until labels stop changing
/// or max_iter updates. A cluster left empty after assignment takes the datum
/// farthest from its own center, among clusters that can spare one.
ClusterModel kmeans(std::span<const Matrix> data, int K, const InitChoice& init, int max_iter = kDefaultMaxIter);

/// init_candidates -> select_init -> kmeans.
struct ClusteringResult {
  ClusterModel model;
  InitChoice init;
  std::size_t init_index = 0;
};

ClusteringResult cluster_with_selected_init(std::span<const Matrix> data, int K, std::uint64_t seed,
                                            int n_random = 50, int max_iter = kDefaultMaxIter);

}  // namespace surfclust
