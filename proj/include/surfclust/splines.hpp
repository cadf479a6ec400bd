#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace surfclust {

/// Degree and clamped knot vector of one axis's B-spline space.
///
/// The first and last knots are each repeated degree+1 times, so the space
/// interpolates at both ends of [domain_lo(), domain_hi()]. Immutable once
/// constructed; the constructor rejects vectors that break these rules.
class BasisSpec {
 public:
  BasisSpec(int degree, std::vector<double> knots);

  int degree() const noexcept { return degree_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  int basis_count() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
  double domain_lo() const noexcept { return knots_.front(); }
  double domain_hi() const noexcept { return knots_.back(); }
  bool contains(double x) const noexcept { return x >= domain_lo() && x <= domain_hi(); }

  /// Index s of the knot span [t_s, t_{s+1}) holding x, with degree <= s < basis_count.
  /// The upper endpoint maps to the last nonempty span.
  int find_span(double x) const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  int degree_;
  std::vector<double> knots_;
};

/// Clamped spec with interior_count equally spaced interior knots strictly inside (lo, hi).
BasisSpec make_clamped_spec(int degree, int interior_count, double lo, double hi);

/// B_r(x) by the Cox-de Boor recursion. Right-closed at domain_hi.
double eval_basis(const BasisSpec& spec, int r, double x);

/// All basis_count values at x; at most degree+1 are nonzero.
Eigen::VectorXd basis_row(const BasisSpec& spec, double x);

/// The degree+1 possibly-nonzero values B_{s-p}(x) .. B_s(x) written into out,
/// where s = spec.find_span(x) is returned.
int basis_nonzeros(const BasisSpec& spec, double x, std::span<double> out);

}  // namespace surfclust
