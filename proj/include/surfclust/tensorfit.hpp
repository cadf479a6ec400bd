#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "surfclust/error.hpp"
#include "surfclust/splines.hpp"

namespace surfclust {

using SpecPtr = std::shared_ptr<const BasisSpec>;

struct SamplePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Noisy observations of one surface.
struct SurfaceSamples {
  std::string id;
  std::vector<SamplePoint> points;
};

/// Fitted R x L tensor-product coefficients of one surface.
struct CoefficientMatrix {
  Eigen::MatrixXd values;
  SpecPtr spec_x;
  SpecPtr spec_y;
};

/// Observations of a d-variate function; coords is m x d.
struct TensorSamples {
  std::string id;
  Eigen::MatrixXd coords;
  Eigen::VectorXd z;
};

/// d-way coefficient array stored with the first index fastest.
struct CoefficientArray {
  std::vector<int> shape;
  Eigen::VectorXd values;

  double at(std::span<const int> index) const;
};

/// Kronecker row (row_y ⊗ row_x): entry l*R + r holds row_y[l] * row_x[r].
Eigen::VectorXd design_row(const Eigen::VectorXd& row_x, const Eigen::VectorXd& row_y);

/// Column-major vectorization and its inverse.
Eigen::VectorXd vec(const Eigen::MatrixXd& m);
Eigen::MatrixXd devec(const Eigen::VectorXd& v, int rows, int cols);

/// m x (R*L) design matrix whose j-th row is design_row at (xs[j], ys[j]).
Eigen::MatrixXd design_matrix(std::span<const double> xs, std::span<const double> ys, const BasisSpec& spec_x,
                              const BasisSpec& spec_y);

/// Factored least-squares problem for a fixed design matrix.
///
/// Householder QR of the design; the singular values of R (equal to those of
/// the design) gate the rank check. Throws rank_deficient when m < columns or
/// the smallest singular value is below rank_tol times the largest.
class LeastSquaresSolver {
 public:
  explicit LeastSquaresSolver(Eigen::MatrixXd design, double rank_tol = 1e-10);

  Eigen::VectorXd solve(const Eigen::VectorXd& z) const;

  const Eigen::MatrixXd& design() const noexcept { return design_; }
  double condition_number() const noexcept { return condition_; }

 private:
  Eigen::MatrixXd design_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  double condition_ = 0.0;
};

/// Reusable fitter for many surfaces observed at the same (x, y) locations.
class SurfaceFitter {
 public:
  SurfaceFitter(std::span<const double> xs, std::span<const double> ys, SpecPtr spec_x, SpecPtr spec_y);

  CoefficientMatrix fit(const Eigen::VectorXd& z) const;

  std::size_t sample_count() const noexcept { return static_cast<std::size_t>(solver_.design().rows()); }
  const Eigen::MatrixXd& design() const noexcept { return solver_.design(); }

 private:
  SpecPtr spec_x_;
  SpecPtr spec_y_;
  LeastSquaresSolver solver_;
};

CoefficientMatrix fit_surface(const SurfaceSamples& samples, SpecPtr spec_x, SpecPtr spec_y);

/// Result of fitting one surface of a batch; exactly one of coefficients / error is set.
struct FitOutcome {
  std::optional<CoefficientMatrix> coefficients;
  std::optional<Error> error;
};

/// Fits every surface with one shared spec pair. Consecutive surfaces sampled at
/// identical locations reuse a single factorization. Failures are reported per
/// surface rather than thrown.
std::vector<FitOutcome> fit_surfaces(std::span<const SurfaceSamples> surfaces, SpecPtr spec_x, SpecPtr spec_y);

/// basis_row(x)ᵀ Θ basis_row(y).
double eval_surface(const CoefficientMatrix& theta, double x, double y);

CoefficientArray fit_tensor(const TensorSamples& samples, std::span<const BasisSpec> specs);

/// [min, max] of the x and y coordinates over every sample of every surface.
std::pair<std::pair<double, double>, std::pair<double, double>> observed_domain(
    std::span<const SurfaceSamples> surfaces);

}  // namespace surfclust
