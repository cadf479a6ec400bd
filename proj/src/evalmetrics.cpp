#include "surfclust/evalmetrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "surfclust/error.hpp"
#include "surfclust/matkmeans.hpp"

namespace surfclust {

namespace {

constexpr int kMaxEnumerationK = 8;

// confusion(t, p) = #{i : truth_i = t, pred_i = p}
Eigen::MatrixXi confusion(std::span<const int> pred, std::span<const int> truth, int K) {
  if (K < 1) throw Error(ErrorKind::label_out_of_range, "K must be at least 1");
  if (pred.size() != truth.size()) {
    throw Error(ErrorKind::length_mismatch, "predicted and true label vectors differ in length");
  }
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(K, K);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= K || truth[i] < 0 || truth[i] >= K) {
      throw Error(ErrorKind::label_out_of_range, "label at position " + std::to_string(i) + " outside [0, " +
                                                     std::to_string(K) + ")");
    }
    ++table(truth[i], pred[i]);
  }
  return table;
}

}  // namespace

int misspecification_by_enumeration(std::span<const int> pred, std::span<const int> truth, int K) {
  const Eigen::MatrixXi table = confusion(pred, truth, K);
  std::vector<int> tau(static_cast<std::size_t>(K));
  std::iota(tau.begin(), tau.end(), 0);
  int best_agree = 0;
  do {
    int agree = 0;
    for (int t = 0; t < K; ++t) agree += table(t, tau[static_cast<std::size_t>(t)]);
    best_agree = std::max(best_agree, agree);
  } while (std::next_permutation(tau.begin(), tau.end()));
  return static_cast<int>(pred.size()) - best_agree;
}

int misspecification_by_assignment(std::span<const int> pred, std::span<const int> truth, int K) {
  const Eigen::MatrixXi table = confusion(pred, truth, K);
  const std::vector<int> tau = solve_assignment(-table.cast<double>());
  int agree = 0;
  for (int t = 0; t < K; ++t) agree += table(t, tau[static_cast<std::size_t>(t)]);
  return static_cast<int>(pred.size()) - agree;
}

int misspecification(std::span<const int> pred, std::span<const int> truth, int K) {
  return K <= kMaxEnumerationK ? misspecification_by_enumeration(pred, truth, K)
                               : misspecification_by_assignment(pred, truth, K);
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw Error(ErrorKind::dimension_mismatch, "assignment needs a square cost matrix");
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Shortest augmenting paths with row/column potentials; 1-based with a dummy column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const int r0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double reduced = cost(r0 - 1, col - 1) - u[r0] - v[col];
        if (reduced < minv[col]) {
          minv[col] = reduced;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> result(static_cast<std::size_t>(n));
  for (int col = 1; col <= n; ++col) result[static_cast<std::size_t>(match[col] - 1)] = col - 1;
  return result;
}

ErrorAggregate aggregate(const RunErrors& errors) {
  if (errors.per_run.empty()) return {};
  long long total = 0;
  int with_error = 0;
  for (int e : errors.per_run) {
    total += e;
    if (e >= 1) ++with_error;
  }
  const double B = static_cast<double>(errors.per_run.size());
  ErrorAggregate out;
  out.nu = with_error / B;
  out.phi = with_error > 0 ? static_cast<double>(total) / (B * out.nu) : 0.0;
  return out;
}

double hausdorff(std::span<const Eigen::MatrixXd> a, std::span<const Eigen::MatrixXd> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::empty_set, "Hausdorff distance of an empty set");
  auto directed = [](std::span<const Eigen::MatrixXd> from, std::span<const Eigen::MatrixXd> to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, frobenius_distance(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace surfclust
