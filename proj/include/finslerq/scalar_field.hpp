#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finslerq/finsler.hpp"
#include "finslerq/smooth_map.hpp"
#include "finslerq/types.hpp"

namespace finslerq::semilip {

/// Immutable real function on chart coordinates with derivative access.
///
/// Copies share the underlying expression tree. Registered families can be
/// combined with sums, products, reciprocals and composition with a
/// SmoothMap; every node supplies an analytic gradient.
class ScalarField {
 public:
  enum class Kind {
    Constant,
    Affine,
    Arctan,
    Phi,
    PolynomialClamped,
    Tabulated1d,
    Mollified1d,
    SmoothTruncatedDistance,
    Sum,
    Product,
    Reciprocal,
    Composed,
  };

  class Node;

  static ScalarField constant(double value);
  /// <gradient, x> + offset.
  static ScalarField affine(Vec gradient, double offset);
  /// amplitude * atan(scale * x[axis] + shift) + offset.
  static ScalarField arctan(double amplitude = 1.0, double scale = 1.0, double shift = 0.0,
                            double offset = 0.0, int axis = 0);
  /// sign * phi(x[0]) with phi(t) = t - atan t.
  static ScalarField phi(double sign = 1.0);
  static ScalarField neg_phi() { return phi(-1.0); }
  /// p(clamp(x[axis], lo, hi)) with coefficients in increasing degree; p'
  /// must vanish at lo and hi so that the clamped function is C^1.
  static ScalarField polynomial_clamped(std::vector<double> coefficients, double lo, double hi,
                                        int axis = 0);
  /// Piecewise-linear interpolant, constant beyond the table. Not C^1.
  static ScalarField tabulated_1d(std::vector<double> xs, std::vector<double> ys);
  /// Convolution of a tabulated field with the quartic kernel
  /// 15/16 (1 - s^2)^2 on [-1, 1] scaled to half-width `width`.
  static ScalarField mollified_1d(const ScalarField& tabulated, double width);
  /// s(F(x - center)) for a constant norm field, with s a C^1 saturation of
  /// min{t, 1} satisfying 0 <= s' <= 1 and min{t,1} - delta <= s <= min{t,1}.
  static ScalarField smooth_truncated_distance(const finsler::MinkowskiNormField& field,
                                               Vec center, double delta);

  static ScalarField from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  double operator()(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  /// Central differences, step 1e-6.
  Vec gradient_fd(const Vec& x) const;

  Kind kind() const;
  /// False for tabulated (piecewise-linear) fields and anything built on them.
  bool is_c1() const;

  ScalarField operator+(const ScalarField& other) const;
  ScalarField operator-(const ScalarField& other) const;
  ScalarField scaled(double factor) const;
  ScalarField plus(double constant) const;
  ScalarField times(const ScalarField& other) const;
  ScalarField reciprocal() const;
  /// x -> f(map(x)).
  ScalarField compose(const isometry::SmoothMap& map) const;

  /// Tabulation data for Tabulated1d fields (empty otherwise).
  const std::vector<double>& table_xs() const;
  const std::vector<double>& table_ys() const;

 private:
  explicit ScalarField(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::string to_string(ScalarField::Kind kind);

struct DerivativeSelfCheck {
  double max_rel_error = 0.0;
  Vec worst_x;
  bool pass = true;
};

/// Analytic gradient vs central differences within rel_tol * max(1, |grad|).
DerivativeSelfCheck derivative_self_check(const ScalarField& f, const std::vector<Vec>& xs,
                                          double rel_tol = 1e-5);

}  // namespace finslerq::semilip
