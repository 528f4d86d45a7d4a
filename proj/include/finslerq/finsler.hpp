#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finslerq/quasimetric.hpp"
#include "finslerq/types.hpp"

namespace finslerq::finsler {

/// phi(t) = t - arctan t, the potential of the one-dimensional index-0 example.
double example31_phi(double t);
/// phi'(t) = t^2 / (1 + t^2).
double example31_dphi(double t);

/// Field of Randers-type Minkowski norms
///
///   F(x, v) = sqrt(v^T A v) + <b(x), v>
///
/// with a constant positive definite A. Euclidean and Riemannian fields have
/// b = 0; the generic Randers family uses an affine drift b(x) = b0 + B x;
/// the example31 family is one-dimensional with b(x) = -phi'(x).
///
/// The drift is not required to satisfy ||b||_{A^-1} < 1 at construction so
/// that invalid fields can be diagnosed by validate_minkowski.
class MinkowskiNormField {
 public:
  enum class Family { Euclidean, Riemannian, Randers, Example31 };

  static MinkowskiNormField euclidean(int dimension);
  static MinkowskiNormField riemannian(Mat metric);
  static MinkowskiNormField randers(Mat metric, Vec drift, Mat drift_gradient = Mat());
  static MinkowskiNormField example31();

  double operator()(const Vec& x, const Vec& v) const;

  /// dF/dv at v != 0.
  Vec gradient_v(const Vec& x, const Vec& v) const;

  Vec drift_at(const Vec& x) const;
  /// ||b(x)||_{A^-1}; the field is a Minkowski norm at x iff this is < 1.
  double drift_norm(const Vec& x) const;
  /// 1 - ||b(x)||_{A^-1}, evaluated without cancellation where a closed form
  /// exists; F(x, .) is a Minkowski norm iff this is positive.
  double minkowski_margin(const Vec& x) const;

  Family family() const noexcept { return family_; }
  int dimension() const noexcept { return static_cast<int>(metric_.rows()); }
  const Mat& metric() const noexcept { return metric_; }
  const Vec& drift_offset() const noexcept { return drift_; }
  const Mat& drift_gradient() const noexcept { return drift_gradient_; }

  /// No dependence on the base point.
  bool is_constant() const noexcept;
  bool is_reversible() const noexcept;

 private:
  MinkowskiNormField(Family family, Mat metric, Vec drift, Mat drift_gradient);

  Family family_;
  Mat metric_;
  Mat metric_inverse_;
  Vec drift_;
  Mat drift_gradient_;
};

std::string to_string(MinkowskiNormField::Family family);

struct MinkowskiViolation {
  std::string check;  // homogeneity | subadditivity | separation | positive-definite | drift
  Vec x;
  Vec v;
  double magnitude = 0.0;
};

struct MinkowskiReport {
  std::vector<MinkowskiViolation> violations;
  std::vector<std::string> notes;
  bool valid() const noexcept { return violations.empty(); }
};

/// Sampled check of the Minkowski-norm axioms, including positive
/// definiteness of the fundamental tensor g_v = 1/2 d^2[F^2](v) by a
/// central-difference Hessian (step 1e-4 |v|, eigenvalue threshold 1e-8).
MinkowskiReport validate_minkowski(const MinkowskiNormField& field, const std::vector<Vec>& xs,
                                   const std::vector<Vec>& vs);

struct Box {
  Vec lo;
  Vec hi;

  int dimension() const noexcept { return static_cast<int>(lo.size()); }
  bool contains(const Vec& p, double tolerance = 1e-12) const;
};

/// Box domain with a norm field and a regular grid for graph distances.
class FinslerChart {
 public:
  /// stencil = 0 selects the default radius (1 in 1-D, 2 otherwise).
  FinslerChart(Box box, MinkowskiNormField field, std::vector<int> grid, int stencil = 0);

  const Box& box() const noexcept { return box_; }
  const MinkowskiNormField& field() const noexcept { return field_; }
  const std::vector<int>& grid() const noexcept { return grid_; }
  int stencil() const noexcept { return stencil_; }
  int dimension() const noexcept { return box_.dimension(); }
  double step(int axis) const;
  std::size_t node_count() const;
  Vec node(std::size_t linear_index) const;

  void require_inside(const Vec& p, const char* what) const;

 private:
  Box box_;
  MinkowskiNormField field_;
  std::vector<int> grid_;
  int stencil_;
};

struct PiecewisePath {
  std::vector<Vec> nodes;
};

inline constexpr int kDefaultQuadratureOrder = 5;

/// Gauss-Legendre length of the straight segment a -> b.
double segment_length(const MinkowskiNormField& field, const Vec& a, const Vec& b,
                      int order = kDefaultQuadratureOrder);

/// Length of a polyline; every node must lie in the chart.
double path_length(const FinslerChart& chart, const PiecewisePath& path,
                   int order = kDefaultQuadratureOrder);

struct GraphDistance {
  double value = 0.0;
  PiecewisePath path;
  std::size_t settled = 0;
};

/// Shortest directed path in the stencil graph of the chart grid. Query
/// points that are not grid nodes are attached to the grid nodes of their
/// surrounding stencil block. Edge weights are direction dependent.
GraphDistance finsler_distance_graph(const FinslerChart& chart, const Vec& x, const Vec& y,
                                     int order = kDefaultQuadratureOrder);

/// Graph distances from x to every grid node (indexed as FinslerChart::node).
std::vector<double> grid_distances_from(const FinslerChart& chart, const Vec& x,
                                        int order = kDefaultQuadratureOrder);

struct RefineResult {
  double value = 0.0;
  double initial = 0.0;
  PiecewisePath path;
  bool converged = false;
  int sweeps = 0;
};

/// Derivative-free coordinate descent on interior nodes (Brent per
/// coordinate, nodes clamped to the box) until the relative improvement of a
/// sweep drops below 1e-10. Never returns a value above the initial length.
RefineResult finsler_distance_refine(const FinslerChart& chart, const PiecewisePath& initial,
                                     int max_sweeps = 500, int order = kDefaultQuadratureOrder);

/// Drift-derivative specification of a one-dimensional Randers structure
/// F(x, v) = |v| - phi'(x) v.
struct DriftSpec {
  enum class Kind { Example31, Custom };
  Kind kind = Kind::Custom;
  std::function<double(double)> dphi;

  static DriftSpec example31();
  static DriftSpec custom(std::function<double(double)> dphi);
};

/// Closed-form / quadrature distance of a one-dimensional Randers structure:
/// integral of (1 - phi') forward and of (1 + phi') backward.
double randers_1d_distance(const DriftSpec& drift, double x, double y);

enum class DistanceMethod { Graph, GraphRefined, Oracle, Auto };

std::string to_string(DistanceMethod method);
DistanceMethod distance_method_from_string(const std::string& name);

struct DistanceRecord {
  Vec x;
  Vec y;
  double value = 0.0;
  std::string method;
  double error_estimate = 0.0;
};

/// Exact distance when the chart admits one: constant fields (straight
/// segments are minimizing) and one-dimensional Randers fields.
std::optional<double> oracle_distance(const FinslerChart& chart, const Vec& x, const Vec& y);

/// Auto uses the oracle when available and graph + refinement otherwise.
DistanceRecord finsler_distance(const FinslerChart& chart, const Vec& x, const Vec& y,
                                DistanceMethod method = DistanceMethod::Auto);

/// (1 - s) / (1 + s), s = ||b||_{A^-1}, for constant fields.
std::optional<double> certified_index_lower(const MinkowskiNormField& field);

using PointPair = std::pair<Vec, Vec>;

/// Upper estimate of the index of symmetry from computed distances on
/// sampled pairs (both orientations of each pair).
quasimetric::SymmetryReport chart_index_of_symmetry(const FinslerChart& chart,
                                                    const std::vector<PointPair>& pairs,
                                                    DistanceMethod method = DistanceMethod::Auto);

}  // namespace finslerq::finsler
