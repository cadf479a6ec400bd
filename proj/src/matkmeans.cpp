#include "surfclust/matkmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "surfclust/error.hpp"
#include "surfclust/random.hpp"

namespace surfclust {

namespace {

void check_data(std::span<const Matrix> data, int K) {
  if (K < 1) throw Error(ErrorKind::insufficient_data, "K must be at least 1");
  if (data.size() < static_cast<std::size_t>(K)) {
    throw Error(ErrorKind::insufficient_data,
                std::to_string(data.size()) + " data matrices for K = " + std::to_string(K));
  }
  for (const auto& m : data) {
    if (m.rows() != data[0].rows() || m.cols() != data[0].cols()) {
      throw Error(ErrorKind::dimension_mismatch, "data matrices differ in shape");
    }
  }
}

std::vector<Matrix> pick(std::span<const Matrix> data, const std::vector<std::size_t>& indices) {
  std::vector<Matrix> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(data[i]);
  return out;
}

// Lowest-index nearest center and its distance.
std::pair<int, double> nearest(const Matrix& x, std::span<const Matrix> centers) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double d = frobenius_distance(x, centers[k]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return {best, best_d};
}

double total_nearest(const Eigen::MatrixXd& dist, const std::vector<std::size_t>& subset) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (auto s : subset) best = std::min(best, dist(i, static_cast<Eigen::Index>(s)));
    total += best;
  }
  return total;
}

// C(n, k) saturating at `cap` + 1.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  k = std::min(k, n - k);
  long double value = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) {
    value = value * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (value > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(std::llround(value));
}

}  // namespace

double frobenius_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::dimension_mismatch, "matrices differ in shape");
  }
  return (a - b).norm();
}

Eigen::MatrixXd pairwise_distances(std::span<const Matrix> data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = frobenius_distance(data[i], data[j]);
    }
  }
  return dist;
}

std::string_view to_string(InitMethod method) {
  switch (method) {
    case InitMethod::random_entries: return "random-entries";
    case InitMethod::farthest_pair_greedy: return "farthest-pair-greedy";
    case InitMethod::k_center_greedy: return "k-center-greedy";
    case InitMethod::random_pick: return "random-pick";
    case InitMethod::preclustered: return "preclustered";
  }
  return "unknown";
}

std::optional<InitMethod> parse_init_method(std::string_view name) {
  for (auto m : {InitMethod::random_entries, InitMethod::farthest_pair_greedy, InitMethod::k_center_greedy,
                 InitMethod::random_pick, InitMethod::preclustered}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

InitChoice init_random_entries(std::span<const Matrix> data, int K, std::uint64_t seed) {
  check_data(data, K);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& m : data) {
    lo = std::min(lo, m.minCoeff());
    hi = std::max(hi, m.maxCoeff());
  }
  Rng rng(seed);
  InitChoice choice{InitMethod::random_entries, seed, {}, {}, {}};
  for (int k = 0; k < K; ++k) {
    Matrix c(data[0].rows(), data[0].cols());
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, j) = rng.uniform(lo, hi);
    }
    choice.centers.push_back(std::move(c));
  }
  return choice;
}

InitChoice init_farthest_pair(std::span<const Matrix> data, int K) {
  check_data(data, K);
  const Eigen::MatrixXd dist = pairwise_distances(data);
  const std::size_t n = data.size();

  std::size_t a = 0, b = n > 1 ? 1 : 0;
  double widest = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(i, j) > widest) {
        widest = dist(i, j);
        a = i;
        b = j;
      }
    }
  }
  std::vector<std::size_t> chosen{a};
  if (K >= 2) chosen.push_back(b);

  std::vector<bool> used(n, false);
  for (auto c : chosen) used[c] = true;
  while (chosen.size() < static_cast<std::size_t>(K)) {
    std::size_t best = n;
    double best_avg = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      double sum = 0.0;
      for (auto c : chosen) sum += dist(i, c);
      const double avg = sum / static_cast<double>(chosen.size());
      if (avg > best_avg) {
        best_avg = avg;
        best = i;
      }
    }
    used[best] = true;
    chosen.push_back(best);
  }
  return {InitMethod::farthest_pair_greedy, 0, pick(data, chosen), chosen, {}};
}

InitChoice init_min_total_distance(std::span<const Matrix> data, int K, std::uint64_t max_exhaustive_subsets) {
  check_data(data, K);
  const Eigen::MatrixXd dist = pairwise_distances(data);
  const std::size_t n = data.size();
  const auto k = static_cast<std::size_t>(K);

  std::vector<std::size_t> best_subset;
  std::string note;
  if (binomial_capped(n, k, max_exhaustive_subsets) <= max_exhaustive_subsets) {
    note = "exhaustive";
    std::vector<std::size_t> subset(k);
    std::iota(subset.begin(), subset.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
      const double cost = total_nearest(dist, subset);
      if (cost < best) {
        best = cost;
        best_subset = subset;
      }
      // Next combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && subset[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
  } else {
    note = "swap-search";
    // Greedy build, then first-improvement swaps until none lowers the cost.
    std::vector<bool> in(n, false);
    for (std::size_t step = 0; step < k; ++step) {
      std::size_t pick_i = n;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (in[i]) continue;
        best_subset.push_back(i);
        const double cost = total_nearest(dist, best_subset);
        best_subset.pop_back();
        if (cost < best) {
          best = cost;
          pick_i = i;
        }
      }
      in[pick_i] = true;
      best_subset.push_back(pick_i);
    }
    double current = total_nearest(dist, best_subset);
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t slot = 0; slot < k && !improved; ++slot) {
        for (std::size_t i = 0; i < n && !improved; ++i) {
          if (in[i]) continue;
          const std::size_t old = best_subset[slot];
          best_subset[slot] = i;
          const double cost = total_nearest(dist, best_subset);
          if (cost < current - 1e-12 * std::max(1.0, current)) {
            current = cost;
            in[old] = false;
            in[i] = true;
            improved = true;
          } else {
            best_subset[slot] = old;
          }
        }
      }
    }
    std::sort(best_subset.begin(), best_subset.end());
  }
  return {InitMethod::k_center_greedy, 0, pick(data, best_subset), best_subset, note};
}

InitChoice init_random_pick(std::span<const Matrix> data, int K, std::uint64_t seed) {
  check_data(data, K);
  Rng rng(seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(K); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(static_cast<std::size_t>(K));
  return {InitMethod::random_pick, seed, pick(data, order), order, {}};
}

InitChoice init_preclustered(std::span<const Matrix> data, std::vector<Matrix> centers) {
  if (centers.empty()) throw Error(ErrorKind::insufficient_data, "no centers supplied");
  check_data(data, static_cast<int>(centers.size()));
  for (const auto& c : centers) {
    if (c.rows() != data[0].rows() || c.cols() != data[0].cols()) {
      throw Error(ErrorKind::dimension_mismatch, "supplied center shape differs from the data");
    }
  }
  return {InitMethod::preclustered, 0, std::move(centers), {}, {}};
}

std::vector<InitChoice> init_candidates(std::span<const Matrix> data, int K, std::uint64_t seed, int n_random) {
  check_data(data, K);
  std::vector<InitChoice> out;
  out.reserve(static_cast<std::size_t>(n_random) + 3);
  out.push_back(init_farthest_pair(data, K));
  out.push_back(init_min_total_distance(data, K));
  for (int r = 0; r < n_random; ++r) {
    out.push_back(init_random_pick(data, K, derive_seed(seed, 0xD, static_cast<std::uint64_t>(r))));
  }
  out.push_back(init_random_entries(data, K, derive_seed(seed, 0xA, 0)));
  return out;
}

double mean_nearest_distance(std::span<const Matrix> data, std::span<const Matrix> centers) {
  if (data.empty() || centers.empty()) throw Error(ErrorKind::empty_set, "no data or no centers");
  double total = 0.0;
  for (const auto& x : data) total += nearest(x, centers).second;
  return total / static_cast<double>(data.size());
}

std::size_t select_init_index(std::span<const Matrix> data, std::span<const InitChoice> candidates) {
  if (candidates.empty()) throw Error(ErrorKind::insufficient_data, "no initialization candidates");
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double score = mean_nearest_distance(data, candidates[c].centers);
    if (score < best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

InitChoice select_init(std::span<const Matrix> data, std::span<const InitChoice> candidates) {
  return candidates[select_init_index(data, candidates)];
}

namespace {

struct Assignment {
  std::vector<int> labels;
  std::vector<double> distances;
};

Assignment assign(std::span<const Matrix> data, std::span<const Matrix> centers) {
  Assignment a{std::vector<int>(data.size()), std::vector<double>(data.size())};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto [k, d] = nearest(data[i], centers);
    a.labels[i] = k;
    a.distances[i] = d;
  }
  return a;
}

// Moves the farthest-from-center datum of a cluster with two or more members into
// each empty cluster, and makes it that cluster's center.
void repair_empty(std::span<const Matrix> data, std::vector<Matrix>& centers, Assignment& a) {
  const std::size_t K = centers.size();
  std::vector<int> sizes(K, 0);
  for (int l : a.labels) ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t k = 0; k < K; ++k) {
    if (sizes[k] > 0) continue;
    std::size_t far = data.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (sizes[static_cast<std::size_t>(a.labels[i])] < 2) continue;
      if (a.distances[i] > far_d) {
        far_d = a.distances[i];
        far = i;
      }
    }
    --sizes[static_cast<std::size_t>(a.labels[far])];
    ++sizes[k];
    a.labels[far] = static_cast<int>(k);
    a.distances[far] = 0.0;
    centers[k] = data[far];
  }
}

std::vector<Matrix> means(std::span<const Matrix> data, const std::vector<int>& labels, std::size_t K) {
  std::vector<Matrix> sums(K, Matrix::Zero(data[0].rows(), data[0].cols()));
  std::vector<int> counts(K, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    sums[static_cast<std::size_t>(labels[i])] += data[i];
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  for (std::size_t k = 0; k < K; ++k) sums[k] /= static_cast<double>(counts[k]);
  return sums;
}

std::pair<double, double> scores(std::span<const Matrix> data, std::span<const Matrix> centers,
                                 const std::vector<int>& labels) {
  double sq = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    sq += (data[i] - centers[static_cast<std::size_t>(labels[i])]).squaredNorm();
  }
  return {sq / static_cast<double>(data.size()), mean_nearest_distance(data, centers)};
}

}  // namespace

ClusterModel kmeans(std::span<const Matrix> data, int K, const InitChoice& init, int max_iter) {
  check_data(data, K);
  if (init.centers.size() != static_cast<std::size_t>(K)) {
    throw Error(ErrorKind::dimension_mismatch, "initialization has " + std::to_string(init.centers.size()) +
                                                   " centers for K = " + std::to_string(K));
  }
  for (const auto& c : init.centers) {
    if (c.rows() != data[0].rows() || c.cols() != data[0].cols()) {
      throw Error(ErrorKind::dimension_mismatch, "initial center shape differs from the data");
    }
  }

  ClusterModel model;
  std::vector<Matrix> centers = init.centers;
  auto record = [&](const std::vector<int>& labels) {
    const auto [sq, obj] = scores(data, centers, labels);
    model.potential_trace.push_back(sq);
    model.objective_trace.push_back(obj);
  };

  Assignment current = assign(data, centers);
  repair_empty(data, centers, current);
  record(current.labels);

  for (int it = 0; it < max_iter; ++it) {
    centers = means(data, current.labels, centers.size());
    ++model.iterations;
    record(current.labels);

    Assignment next = assign(data, centers);
    repair_empty(data, centers, next);
    record(next.labels);
    const bool unchanged = next.labels == current.labels;
    current = std::move(next);
    if (unchanged) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged) centers = means(data, current.labels, centers.size());

  model.labels = std::move(current.labels);
  model.centers = std::move(centers);
  const auto [sq, obj] = scores(data, model.centers, model.labels);
  model.mean_squared_distance = sq;
  model.objective = obj;
  return model;
}

ClusteringResult cluster_with_selected_init(std::span<const Matrix> data, int K, std::uint64_t seed, int n_random,
                                            int max_iter) {
  const auto candidates = init_candidates(data, K, seed, n_random);
  const std::size_t chosen = select_init_index(data, candidates);
  ClusteringResult result{kmeans(data, K, candidates[chosen], max_iter), candidates[chosen], chosen};
  return result;
}

}  // namespace surfclust
