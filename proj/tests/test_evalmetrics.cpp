#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "surfclust/error.hpp"
#include "surfclust/evalmetrics.hpp"

using namespace surfclust;

namespace {

std::vector<int> random_labels(std::mt19937_64& gen, int n, int K) {
  std::uniform_int_distribution<int> u(0, K - 1);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (auto& l : out) l = u(gen);
  return out;
}

std::vector<Eigen::MatrixXd> scalar_set(std::initializer_list<double> values) {
  std::vector<Eigen::MatrixXd> out;
  for (double v : values) out.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  return out;
}

}  // namespace

TEST(Misspecification, Examples) {
  const std::vector<int> truth{0, 0, 0, 1, 1, 1};
  EXPECT_EQ(misspecification(truth, truth, 2), 0);
  EXPECT_EQ(misspecification(std::vector<int>{1, 1, 1, 0, 0, 0}, truth, 2), 0);
  EXPECT_EQ(misspecification(std::vector<int>{0, 0, 1, 1, 1, 1}, truth, 2), 1);
}

TEST(Misspecification, Errors) {
  const std::vector<int> a{0, 1}, b{0, 1, 1}, bad{0, 2};
  EXPECT_THROW(misspecification(a, b, 2), Error);
  EXPECT_THROW(misspecification(bad, a, 2), Error);
  EXPECT_THROW(misspecification(std::vector<int>{-1, 0}, a, 2), Error);
}

TEST(Misspecification, BothRoutesEqualBruteForce) {
  std::mt19937_64 gen(55);
  for (int K = 2; K <= 4; ++K) {
    for (int t = 0; t < 200; ++t) {
      const int n = 5 + t % 20;
      const auto pred = random_labels(gen, n, K), truth = random_labels(gen, n, K);
      const int expected = oracle::misspec_brute_force(pred, truth, K);
      EXPECT_EQ(misspecification_by_assignment(pred, truth, K), expected);
      EXPECT_EQ(misspecification_by_enumeration(pred, truth, K), expected);
      EXPECT_EQ(misspecification(pred, truth, K), expected);
    }
  }
}

TEST(Misspecification, LargeKUsesAssignment) {
  std::mt19937_64 gen(56);
  for (int t = 0; t < 3; ++t) {
    const auto pred = random_labels(gen, 40, 9), truth = random_labels(gen, 40, 9);
    EXPECT_EQ(misspecification(pred, truth, 9), oracle::misspec_brute_force(pred, truth, 9));
  }
}

TEST(Misspecification, SymmetricRelabelInvariantAndBounded) {
  std::mt19937_64 gen(57);
  for (int t = 0; t < 100; ++t) {
    const int K = 2 + t % 3;
    const int n = 3 * K * (1 + t % 4);
    std::vector<int> truth(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) truth[static_cast<std::size_t>(i)] = i % K;
    const auto pred = random_labels(gen, n, K);

    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<int> relabeled;
    for (int l : pred) relabeled.push_back(perm[static_cast<std::size_t>(l)]);

    const int m = misspecification(pred, truth, K);
    EXPECT_EQ(misspecification(truth, pred, K), m);
    EXPECT_EQ(misspecification(relabeled, truth, K), m);
    EXPECT_GE(m, 0);
    EXPECT_LE(m * K, n * (K - 1));
  }
}

TEST(SolveAssignment, SmallExample) {
  Eigen::Matrix3d cost;
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto match = solve_assignment(cost);
  double total = 0.0;
  for (int r = 0; r < 3; ++r) total += cost(r, match[static_cast<std::size_t>(r)]);
  EXPECT_EQ(total, 5.0);
  EXPECT_THROW(solve_assignment(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST(Aggregate, Examples) {
  EXPECT_EQ(aggregate({{0, 0, 0}, 10}).nu, 0.0);
  EXPECT_EQ(aggregate({{0, 0, 0}, 10}).phi, 0.0);
  const ErrorAggregate mixed = aggregate({{2, 0, 3}, 10});
  EXPECT_DOUBLE_EQ(mixed.nu, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(mixed.phi, 2.5);
  const ErrorAggregate single = aggregate({{4}, 10});
  EXPECT_EQ(single.nu, 1.0);
  EXPECT_EQ(single.phi, 4.0);
}

TEST(Hausdorff, Examples) {
  const auto s = scalar_set({1, 4, -2});
  EXPECT_EQ(hausdorff(s, s), 0.0);
  EXPECT_EQ(hausdorff(scalar_set({0}), scalar_set({3})), 3.0);
  EXPECT_EQ(hausdorff(scalar_set({0, 10}), scalar_set({1})), 9.0);
  EXPECT_THROW(hausdorff(s, std::vector<Eigen::MatrixXd>{}), Error);
}

TEST(Hausdorff, TriangleInequality) {
  std::mt19937_64 gen(58);
  auto random_set = [&] {
    std::vector<Eigen::MatrixXd> out;
    for (int k = 0; k < 3; ++k) out.push_back(oracle::random_matrix(gen, 2, 3));
    return out;
  };
  for (int t = 0; t < 100; ++t) {
    const auto a = random_set(), b = random_set(), c = random_set();
    EXPECT_LE(hausdorff(a, c), hausdorff(a, b) + hausdorff(b, c) + 1e-12);
    EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
  }
}
