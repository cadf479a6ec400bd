#include "surfclust/tensorfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "surfclust/error.hpp"

namespace surfclust {

double CoefficientArray::at(std::span<const int> index) const {
  if (index.size() != shape.size()) throw Error(ErrorKind::dimension_mismatch, "index rank mismatch");
  Eigen::Index flat = 0;
  Eigen::Index stride = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (index[k] < 0 || index[k] >= shape[k]) throw Error(ErrorKind::bad_index, "array index out of range");
    flat += stride * index[k];
    stride *= shape[k];
  }
  return values[flat];
}

Eigen::VectorXd design_row(const Eigen::VectorXd& row_x, const Eigen::VectorXd& row_y) {
  if (row_x.size() == 0 || row_y.size() == 0) throw Error(ErrorKind::length_mismatch, "empty basis row");
  const Eigen::Index R = row_x.size();
  Eigen::VectorXd out(R * row_y.size());
  for (Eigen::Index l = 0; l < row_y.size(); ++l) out.segment(l * R, R) = row_y[l] * row_x;
  return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd devec(const Eigen::VectorXd& v, int rows, int cols) {
  if (rows < 1 || cols < 1 || v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw Error(ErrorKind::length_mismatch, "vector of length " + std::to_string(v.size()) +
                                                " cannot form a " + std::to_string(rows) + "x" +
                                                std::to_string(cols) + " matrix");
  }
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

Eigen::MatrixXd design_matrix(std::span<const double> xs, std::span<const double> ys, const BasisSpec& spec_x,
                              const BasisSpec& spec_y) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::length_mismatch, "x and y sample counts differ");
  const int R = spec_x.basis_count();
  const int L = spec_y.basis_count();
  const int px = spec_x.degree();
  const int py = spec_y.degree();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(R) * L);
  std::vector<double> bx(px + 1), by(py + 1);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const int sx = basis_nonzeros(spec_x, xs[j], bx);
    const int sy = basis_nonzeros(spec_y, ys[j], by);
    for (int b = 0; b <= py; ++b) {
      const int l = sy - py + b;
      for (int a = 0; a <= px; ++a) {
        const int r = sx - px + a;
        M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l) * R + r) = by[b] * bx[a];
      }
    }
  }
  return M;
}

LeastSquaresSolver::LeastSquaresSolver(Eigen::MatrixXd design, double rank_tol)
    : design_(std::move(design)) {
  if (design_.rows() < design_.cols()) {
    throw Error(ErrorKind::rank_deficient, std::to_string(design_.rows()) + " samples for " +
                                               std::to_string(design_.cols()) + " coefficients");
  }
  qr_.compute(design_);
  const Eigen::MatrixXd r =
      qr_.matrixQR().topRows(design_.cols()).template triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
  const double largest = sv.size() > 0 ? sv[0] : 0.0;
  const double smallest = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
  if (!(largest > 0.0) || smallest < rank_tol * largest) {
    throw Error(ErrorKind::rank_deficient,
                "design matrix singular to working precision (sigma_min/sigma_max = " +
                    std::to_string(largest > 0.0 ? smallest / largest : 0.0) + ")");
  }
  condition_ = largest / smallest;
}

Eigen::VectorXd LeastSquaresSolver::solve(const Eigen::VectorXd& z) const {
  if (z.size() != design_.rows()) throw Error(ErrorKind::length_mismatch, "response length does not match design");
  return qr_.solve(z);
}

namespace {

LeastSquaresSolver build_solver(std::span<const double> xs, std::span<const double> ys, const BasisSpec& sx,
                                const BasisSpec& sy) {
  return LeastSquaresSolver(design_matrix(xs, ys, sx, sy));
}

}  // namespace

SurfaceFitter::SurfaceFitter(std::span<const double> xs, std::span<const double> ys, SpecPtr spec_x,
                             SpecPtr spec_y)
    : spec_x_(std::move(spec_x)), spec_y_(std::move(spec_y)), solver_(build_solver(xs, ys, *spec_x_, *spec_y_)) {}

CoefficientMatrix SurfaceFitter::fit(const Eigen::VectorXd& z) const {
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (!std::isfinite(z[j])) throw Error(ErrorKind::corrupt_input, "non-finite response value");
  }
  return {devec(solver_.solve(z), spec_x_->basis_count(), spec_y_->basis_count()), spec_x_, spec_y_};
}

CoefficientMatrix fit_surface(const SurfaceSamples& samples, SpecPtr spec_x, SpecPtr spec_y) {
  if (samples.points.empty()) throw Error(ErrorKind::insufficient_data, "surface '" + samples.id + "' has no samples");
  std::vector<double> xs, ys;
  Eigen::VectorXd z(static_cast<Eigen::Index>(samples.points.size()));
  xs.reserve(samples.points.size());
  ys.reserve(samples.points.size());
  for (std::size_t j = 0; j < samples.points.size(); ++j) {
    xs.push_back(samples.points[j].x);
    ys.push_back(samples.points[j].y);
    z[static_cast<Eigen::Index>(j)] = samples.points[j].z;
  }
  return SurfaceFitter(xs, ys, std::move(spec_x), std::move(spec_y)).fit(z);
}

std::vector<FitOutcome> fit_surfaces(std::span<const SurfaceSamples> surfaces, SpecPtr spec_x, SpecPtr spec_y) {
  std::vector<FitOutcome> out;
  out.reserve(surfaces.size());
  std::optional<SurfaceFitter> fitter;
  std::vector<double> xs, ys;
  for (const auto& s : surfaces) {
    try {
      if (s.points.empty()) throw Error(ErrorKind::insufficient_data, "surface has no samples");
      bool same = fitter && xs.size() == s.points.size();
      for (std::size_t j = 0; same && j < s.points.size(); ++j) {
        same = xs[j] == s.points[j].x && ys[j] == s.points[j].y;
      }
      Eigen::VectorXd z(static_cast<Eigen::Index>(s.points.size()));
      for (std::size_t j = 0; j < s.points.size(); ++j) z[static_cast<Eigen::Index>(j)] = s.points[j].z;
      if (!same) {
        fitter.reset();
        xs.clear();
        ys.clear();
        for (const auto& p : s.points) {
          xs.push_back(p.x);
          ys.push_back(p.y);
        }
        fitter.emplace(xs, ys, spec_x, spec_y);
      }
      out.push_back({fitter->fit(z), std::nullopt});
    } catch (const Error& e) {
      out.push_back({std::nullopt, Error(e.kind(), "surface '" + s.id + "': " + e.detail())});
    }
  }
  return out;
}

double eval_surface(const CoefficientMatrix& theta, double x, double y) {
  const Eigen::VectorXd bx = basis_row(*theta.spec_x, x);
  const Eigen::VectorXd by = basis_row(*theta.spec_y, y);
  if (theta.values.rows() != bx.size() || theta.values.cols() != by.size()) {
    throw Error(ErrorKind::dimension_mismatch, "coefficient matrix does not match its basis specs");
  }
  return bx.dot(theta.values * by);
}

CoefficientArray fit_tensor(const TensorSamples& samples, std::span<const BasisSpec> specs) {
  const auto d = static_cast<Eigen::Index>(specs.size());
  if (d < 2) throw Error(ErrorKind::dimension_mismatch, "tensor fit needs at least two axes");
  if (samples.coords.cols() != d) {
    throw Error(ErrorKind::dimension_mismatch, "coordinates have " + std::to_string(samples.coords.cols()) +
                                                   " columns for " + std::to_string(d) + " axes");
  }
  if (samples.coords.rows() != samples.z.size()) throw Error(ErrorKind::length_mismatch, "coords and z lengths differ");

  std::vector<int> shape;
  Eigen::Index columns = 1;
  for (const auto& s : specs) {
    shape.push_back(s.basis_count());
    columns *= s.basis_count();
  }
  const Eigen::Index m = samples.coords.rows();
  if (m < columns) {
    throw Error(ErrorKind::rank_deficient,
                std::to_string(m) + " samples for " + std::to_string(columns) + " coefficients");
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, columns);
  std::vector<std::vector<double>> local(specs.size());
  std::vector<int> first(specs.size());
  std::vector<int> counter(specs.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
      local[k].resize(specs[k].degree() + 1);
      first[k] = basis_nonzeros(specs[k], samples.coords(j, static_cast<Eigen::Index>(k)), local[k]) -
                 specs[k].degree();
    }
    // Walk the product of the local supports, first axis fastest.
    std::fill(counter.begin(), counter.end(), 0);
    while (true) {
      double value = 1.0;
      Eigen::Index flat = 0;
      Eigen::Index stride = 1;
      for (std::size_t k = 0; k < specs.size(); ++k) {
        value *= local[k][counter[k]];
        flat += stride * (first[k] + counter[k]);
        stride *= shape[k];
      }
      M(j, flat) = value;
      std::size_t k = 0;
      while (k < specs.size() && ++counter[k] > specs[k].degree()) counter[k++] = 0;
      if (k == specs.size()) break;
    }
  }
  return {std::move(shape), LeastSquaresSolver(std::move(M)).solve(samples.z)};
}

std::pair<std::pair<double, double>, std::pair<double, double>> observed_domain(
    std::span<const SurfaceSamples> surfaces) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double xlo = inf, xhi = -inf, ylo = inf, yhi = -inf;
  for (const auto& s : surfaces) {
    for (const auto& p : s.points) {
      xlo = std::min(xlo, p.x);
      xhi = std::max(xhi, p.x);
      ylo = std::min(ylo, p.y);
      yhi = std::max(yhi, p.y);
    }
  }
  if (!(xlo <= xhi)) throw Error(ErrorKind::insufficient_data, "no samples to derive a fitting domain from");
  return {{xlo, xhi}, {ylo, yhi}};
}

}  // namespace surfclust
