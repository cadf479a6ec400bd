#include "surfclust/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "surfclust/error.hpp"

namespace surfclust {

namespace {

void require_in_domain(const BasisSpec& spec, double x) {
  if (!spec.contains(x)) {
    throw Error(ErrorKind::out_of_domain, "x = " + std::to_string(x) + " outside [" +
                                              std::to_string(spec.domain_lo()) + ", " +
                                              std::to_string(spec.domain_hi()) + "]");
  }
}

// Cox-de Boor with 0/0 := 0. The degree-0 indicator is half-open except on the
// span that ends at domain_hi.
double cox_de_boor(const std::vector<double>& t, int i, int p, double x, int last_span) {
  if (p == 0) {
    if (t[i] <= x && x < t[i + 1]) return 1.0;
    return (i == last_span && x == t[i + 1]) ? 1.0 : 0.0;
  }
  double value = 0.0;
  const double left_den = t[i + p] - t[i];
  if (left_den > 0.0) {
    value += (x - t[i]) / left_den * cox_de_boor(t, i, p - 1, x, last_span);
  }
  const double right_den = t[i + p + 1] - t[i + 1];
  if (right_den > 0.0) {
    value += (t[i + p + 1] - x) / right_den * cox_de_boor(t, i + 1, p - 1, x, last_span);
  }
  return value;
}

}  // namespace

BasisSpec::BasisSpec(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw Error(ErrorKind::invalid_domain, "negative spline degree");
  if (knots_.size() < static_cast<std::size_t>(2 * degree_ + 2)) {
    throw Error(ErrorKind::overflow_guard, "knot vector too short for degree " + std::to_string(degree_));
  }
  for (double k : knots_) {
    if (!std::isfinite(k)) throw Error(ErrorKind::invalid_domain, "non-finite knot");
  }
  if (!std::is_sorted(knots_.begin(), knots_.end())) {
    throw Error(ErrorKind::invalid_domain, "knots must be nondecreasing");
  }
  if (!(knots_.front() < knots_.back())) {
    throw Error(ErrorKind::invalid_domain, "empty knot range");
  }
  for (int j = 0; j <= degree_; ++j) {
    if (knots_[j] != knots_.front() || knots_[knots_.size() - 1 - j] != knots_.back()) {
      throw Error(ErrorKind::invalid_domain, "knot vector is not clamped");
    }
  }
  if (knots_[degree_ + 1] == knots_.front() || knots_[knots_.size() - degree_ - 2] == knots_.back()) {
    throw Error(ErrorKind::invalid_domain, "boundary knot multiplicity exceeds degree+1");
  }
}

int BasisSpec::find_span(double x) const {
  const int n = basis_count();
  if (x >= knots_[n]) return n - 1;
  // Last index s in [degree, n-1] with knots[s] <= x.
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

BasisSpec make_clamped_spec(int degree, int interior_count, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::invalid_domain, "require lo < hi");
  }
  if (degree < 0 || interior_count < 0) {
    throw Error(ErrorKind::overflow_guard, "degree and interior knot count must be nonnegative");
  }
  if (interior_count + degree + 1 < 1 || interior_count > 1'000'000 || degree > 64) {
    throw Error(ErrorKind::overflow_guard, "unsupported basis size");
  }
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(interior_count + 2 * degree + 2));
  knots.insert(knots.end(), degree + 1, lo);
  const double step = (hi - lo) / (interior_count + 1);
  for (int k = 1; k <= interior_count; ++k) knots.push_back(lo + step * k);
  knots.insert(knots.end(), degree + 1, hi);
  return BasisSpec(degree, std::move(knots));
}

double eval_basis(const BasisSpec& spec, int r, double x) {
  if (r < 0 || r >= spec.basis_count()) {
    throw Error(ErrorKind::bad_index, "basis index " + std::to_string(r) + " not in [0, " +
                                          std::to_string(spec.basis_count()) + ")");
  }
  require_in_domain(spec, x);
  return cox_de_boor(spec.knots(), r, spec.degree(), x, spec.basis_count() - 1);
}

int basis_nonzeros(const BasisSpec& spec, double x, std::span<double> out) {
  require_in_domain(spec, x);
  const int p = spec.degree();
  if (out.size() < static_cast<std::size_t>(p + 1)) {
    throw Error(ErrorKind::length_mismatch, "output buffer shorter than degree+1");
  }
  const auto& t = spec.knots();
  const int s = spec.find_span(x);

  // Triangular scheme; out[j] ends up holding B_{s-p+j}(x).
  std::vector<double> left(p + 1), right(p + 1);
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[s + 1 - j];
    right[j] = t[s + j] - x;
    double saved = 0.0;
    for (int k = 0; k < j; ++k) {
      const double tmp = out[k] / (right[k + 1] + left[j - k]);
      out[k] = saved + right[k + 1] * tmp;
      saved = left[j - k] * tmp;
    }
    out[j] = saved;
  }
  return s;
}

Eigen::VectorXd basis_row(const BasisSpec& spec, double x) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(spec.basis_count());
  std::vector<double> local(spec.degree() + 1);
  const int s = basis_nonzeros(spec, x, local);
  for (int j = 0; j <= spec.degree(); ++j) row[s - spec.degree() + j] = local[j];
  return row;
}

}  // namespace surfclust
