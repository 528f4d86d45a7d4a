#include "finslerq/smooth_map.hpp"

#include <algorithm>
#include <cmath>

#include "finslerq/errors.hpp"

namespace finslerq::isometry {

struct SmoothMap::Table {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> slopes;

  double value(double x) const {
    if (x <= xs.front()) return ys.front() + slopes.front() * (x - xs.front());
    if (x >= xs.back()) return ys.back() + slopes.back() * (x - xs.back());
    const std::size_t k = segment(x);
    const double h = xs[k + 1] - xs[k];
    const double t = (x - xs[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys[k] + (t3 - 2 * t2 + t) * h * slopes[k] +
           (-2 * t3 + 3 * t2) * ys[k + 1] + (t3 - t2) * h * slopes[k + 1];
  }

  double derivative(double x) const {
    if (x <= xs.front()) return slopes.front();
    if (x >= xs.back()) return slopes.back();
    const std::size_t k = segment(x);
    const double h = xs[k + 1] - xs[k];
    const double t = (x - xs[k]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * ys[k] + (3 * t2 - 4 * t + 1) * h * slopes[k] +
            (-6 * t2 + 6 * t) * ys[k + 1] + (3 * t2 - 2 * t) * h * slopes[k + 1]) /
           h;
  }

  double solve(double y) const {
    if (y <= ys.front()) return xs.front() + (y - ys.front()) / slopes.front();
    if (y >= ys.back()) return xs.back() + (y - ys.back()) / slopes.back();
    const auto it = std::upper_bound(ys.begin(), ys.end(), y);
    const std::size_t k = static_cast<std::size_t>(it - ys.begin()) - 1;
    double lo = xs[k];
    double hi = xs[k + 1];
    for (int iter = 0; iter < 200 && lo < hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (value(mid) < y ? lo : hi) = mid;
    }
    return std::abs(value(lo) - y) <= std::abs(value(hi) - y) ? lo : hi;
  }

 private:
  std::size_t segment(double x) const {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    return std::min(static_cast<std::size_t>(it - xs.begin()) - 1, xs.size() - 2);
  }
};

SmoothMap::SmoothMap(Family family, int dimension) : family_(family), dimension_(dimension) {
  if (dimension < 1) throw Error(ErrorKind::MalformedInput, "map dimension must be positive");
}

SmoothMap SmoothMap::identity(int dimension) {
  SmoothMap map(Family::Identity, dimension);
  map.matrix_ = Mat::Identity(dimension, dimension);
  map.matrix_inverse_ = map.matrix_;
  map.offset_ = Vec::Zero(dimension);
  return map;
}

SmoothMap SmoothMap::translation(Vec offset) {
  SmoothMap map(Family::Translation, static_cast<int>(offset.size()));
  map.matrix_ = Mat::Identity(offset.size(), offset.size());
  map.matrix_inverse_ = map.matrix_;
  map.offset_ = std::move(offset);
  return map;
}

SmoothMap SmoothMap::affine(Mat matrix, Vec offset) {
  const auto n = matrix.rows();
  if (matrix.cols() != n || offset.size() != n) {
    throw Error(ErrorKind::MalformedInput, "affine map needs an n x n matrix and n-vector");
  }
  Eigen::FullPivLU<Mat> lu(matrix);
  if (!lu.isInvertible()) throw Error(ErrorKind::InvalidStructure, "affine map is not invertible");
  SmoothMap map(Family::Affine, static_cast<int>(n));
  map.matrix_inverse_ = lu.inverse();
  map.matrix_ = std::move(matrix);
  map.offset_ = std::move(offset);
  return map;
}

SmoothMap SmoothMap::tabulated_monotone_1d(std::vector<double> xs, std::vector<double> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) {
    throw Error(ErrorKind::MalformedInput, "monotone table needs >= 2 matching (x, y) nodes");
  }
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(xs[k + 1] > xs[k]) || !(ys[k + 1] > ys[k])) {
      throw Error(ErrorKind::InvalidStructure, "monotone table must be strictly increasing");
    }
    secant[k] = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
  }
  std::vector<double> slopes(n);
  slopes.front() = secant.front();
  slopes.back() = secant.back();
  for (std::size_t k = 1; k + 1 < n; ++k) slopes[k] = 0.5 * (secant[k - 1] + secant[k]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = slopes[k] / secant[k];
    const double b = slopes[k + 1] / secant[k];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      slopes[k] = tau * a * secant[k];
      slopes[k + 1] = tau * b * secant[k];
    }
  }
  SmoothMap map(Family::TabulatedMonotone1d, 1);
  map.table_ = std::make_shared<const Table>(Table{std::move(xs), std::move(ys), std::move(slopes)});
  return map;
}

Vec SmoothMap::forward_raw(const Vec& x) const {
  if (x.size() != dimension_) throw Error(ErrorKind::MalformedInput, "map input dimension mismatch");
  switch (family_) {
    case Family::Identity: return x;
    case Family::Translation: return x + offset_;
    case Family::Affine: return matrix_ * x + offset_;
    case Family::TabulatedMonotone1d: return Vec::Constant(1, table_->value(x[0]));
  }
  return x;
}

Vec SmoothMap::inverse_raw(const Vec& y) const {
  if (y.size() != dimension_) throw Error(ErrorKind::MalformedInput, "map input dimension mismatch");
  switch (family_) {
    case Family::Identity: return y;
    case Family::Translation: return y - offset_;
    case Family::Affine: return matrix_inverse_ * (y - offset_);
    case Family::TabulatedMonotone1d: return Vec::Constant(1, table_->solve(y[0]));
  }
  return y;
}

Mat SmoothMap::jacobian_raw(const Vec& x) const {
  if (family_ == Family::TabulatedMonotone1d) return Mat::Constant(1, 1, table_->derivative(x[0]));
  return matrix_;
}

Vec SmoothMap::operator()(const Vec& x) const { return inverted_ ? inverse_raw(x) : forward_raw(x); }

Vec SmoothMap::inverse(const Vec& y) const { return inverted_ ? forward_raw(y) : inverse_raw(y); }

Mat SmoothMap::jacobian(const Vec& x) const {
  if (!inverted_) return jacobian_raw(x);
  return jacobian_raw(inverse_raw(x)).inverse();
}

Mat SmoothMap::jacobian_fd(const Vec& x) const {
  constexpr double h = 1e-6;
  Mat jac(dimension_, dimension_);
  for (int j = 0; j < dimension_; ++j) {
    Vec plus = x;
    Vec minus = x;
    plus[j] += h;
    minus[j] -= h;
    jac.col(j) = ((*this)(plus) - (*this)(minus)) / (2.0 * h);
  }
  return jac;
}

SmoothMap SmoothMap::inverted() const {
  SmoothMap copy = *this;
  copy.inverted_ = !inverted_;
  return copy;
}

const std::vector<double>& SmoothMap::table_xs() const {
  static const std::vector<double> empty;
  return table_ ? table_->xs : empty;
}

const std::vector<double>& SmoothMap::table_ys() const {
  static const std::vector<double> empty;
  return table_ ? table_->ys : empty;
}

std::string to_string(SmoothMap::Family family) {
  switch (family) {
    case SmoothMap::Family::Identity: return "identity";
    case SmoothMap::Family::Translation: return "translation";
    case SmoothMap::Family::Affine: return "affine";
    case SmoothMap::Family::TabulatedMonotone1d: return "tabulated-1d-monotone";
  }
  return "unknown";
}

MapSelfCheck self_check(const SmoothMap& map, const std::vector<Vec>& samples) {
  MapSelfCheck check;
  for (const Vec& y : samples) {
    check.max_roundtrip_error =
        std::max(check.max_roundtrip_error, (map(map.inverse(y)) - y).norm());
    const Mat analytic = map.jacobian(y);
    const Mat numeric = map.jacobian_fd(y);
    const double rel = (analytic - numeric).norm() / std::max(1.0, analytic.norm());
    check.max_jacobian_rel_error = std::max(check.max_jacobian_rel_error, rel);
  }
  check.pass = check.max_roundtrip_error <= 1e-9 && check.max_jacobian_rel_error <= 1e-5;
  return check;
}

}  // namespace finslerq::isometry
