#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace surfclust {

/// Mis-specification counts of B Monte Carlo runs with n surfaces each.
struct RunErrors {
  std::vector<int> per_run;
  int n = 0;
};

struct ErrorAggregate {
  double nu = 0.0;   // fraction of runs with at least one error
  double phi = 0.0;  // mean error count among those runs; 0 when nu == 0
};

/// min over label permutations τ of #{i : pred_i != τ(truth_i)}. Labels are 0-based and < K.
/// Enumerates all K! permutations up to K = 8, solves the assignment problem above.
int misspecification(std::span<const int> pred, std::span<const int> truth, int K);

/// The two exact routes, exposed separately so they can be cross-checked.
int misspecification_by_enumeration(std::span<const int> pred, std::span<const int> truth, int K);
int misspecification_by_assignment(std::span<const int> pred, std::span<const int> truth, int K);

/// Minimum-cost perfect matching on a square cost matrix; result[row] = column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

ErrorAggregate aggregate(const RunErrors& errors);

/// Symmetric Hausdorff distance between two finite sets of matrices under the Frobenius norm.
double hausdorff(std::span<const Eigen::MatrixXd> a, std::span<const Eigen::MatrixXd> b);

}  // namespace surfclust
