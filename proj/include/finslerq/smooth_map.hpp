#pragma once

#include <memory>
#include <string>
#include <vector>

#include "finslerq/types.hpp"

namespace finslerq::isometry {

/// Registered diffeomorphism families between chart coordinates.
class SmoothMap {
 public:
  enum class Family { Identity, Translation, Affine, TabulatedMonotone1d };

  static SmoothMap identity(int dimension);
  static SmoothMap translation(Vec offset);
  /// x -> M x + c with invertible M.
  static SmoothMap affine(Mat matrix, Vec offset);
  /// Monotone C^1 cubic Hermite interpolant (Fritsch-Carlson slopes) through
  /// strictly increasing (xs, ys); extended linearly beyond the table.
  static SmoothMap tabulated_monotone_1d(std::vector<double> xs, std::vector<double> ys);

  Vec operator()(const Vec& x) const;
  Vec inverse(const Vec& y) const;
  Mat jacobian(const Vec& x) const;
  /// Central differences with step 1e-6.
  Mat jacobian_fd(const Vec& x) const;

  /// Map representing the inverse diffeomorphism.
  SmoothMap inverted() const;

  Family family() const noexcept { return family_; }
  int dimension() const noexcept { return dimension_; }
  bool is_inverted() const noexcept { return inverted_; }

  const Mat& matrix() const noexcept { return matrix_; }
  const Vec& offset() const noexcept { return offset_; }
  const std::vector<double>& table_xs() const;
  const std::vector<double>& table_ys() const;

 private:
  struct Table;

  SmoothMap(Family family, int dimension);
  Vec forward_raw(const Vec& x) const;
  Vec inverse_raw(const Vec& y) const;
  Mat jacobian_raw(const Vec& x) const;

  Family family_;
  int dimension_;
  bool inverted_ = false;
  Mat matrix_;
  Mat matrix_inverse_;
  Vec offset_;
  std::shared_ptr<const Table> table_;
};

std::string to_string(SmoothMap::Family family);

struct MapSelfCheck {
  double max_roundtrip_error = 0.0;  // |h(h^-1(y)) - y|
  double max_jacobian_rel_error = 0.0;
  bool pass = true;
};

/// h(h^-1(y)) = y within 1e-9 and analytic vs finite-difference Jacobian
/// within 1e-5 relative on the samples.
MapSelfCheck self_check(const SmoothMap& map, const std::vector<Vec>& samples);

}  // namespace finslerq::isometry
