#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "finslerq/finsler.hpp"
#include "finslerq/scalar_field.hpp"
#include "finslerq/types.hpp"

namespace finslerq::conealg {

using finsler::FinslerChart;
using semilip::ScalarField;

/// Sub-multiplicative constant of the cone product: hemi(ab) <= K hemi(a) hemi(b).
inline constexpr double kProductConstant = 2.0;
/// Values down to -kNonnegativeSlack count as nonnegative.
inline constexpr double kNonnegativeSlack = 1e-12;

/// A chart together with the points on which norms are estimated. Elements
/// can only be combined when they share the same domain object.
struct CertificationDomain {
  FinslerChart chart;
  std::vector<Vec> points;
};

using Domain = std::shared_ptr<const CertificationDomain>;

Domain make_domain(FinslerChart chart, std::vector<Vec> points);
/// Every node of the chart grid.
Domain grid_domain(const FinslerChart& chart);
/// The index-0 chart on [-1e8, 1e8] sampled at 0, +-10^k for k in [-3, 8]
/// (40 points per decade) and on [-5, 5] with step 0.01, in increasing order.
Domain example31_domain();

/// Grid estimates of the norm components; both are lower bounds of the true
/// suprema.
struct NormEstimate {
  double sup_norm = 0.0;
  double slip_norm = 0.0;  // +infinity when the derivative profile diverges
  double min_value = 0.0;
  Vec min_at;
  Vec sup_at;
  Vec slip_at;
  double hemi() const noexcept { return std::max(sup_norm, slip_norm); }
};

NormEstimate estimate_norms(const ScalarField& f, const CertificationDomain& domain);

class ConeElement {
 public:
  const ScalarField& field() const noexcept { return field_; }
  const Domain& domain() const noexcept { return domain_; }
  double sup_norm() const noexcept { return norms_.sup_norm; }
  double slip_norm() const noexcept { return norms_.slip_norm; }
  double hemi_norm() const noexcept { return norms_.hemi(); }
  const NormEstimate& norms() const noexcept { return norms_; }
  double operator()(const Vec& x) const { return field_(x); }

  nlohmann::json to_json() const;

 private:
  friend class ConeAccess;
  ConeElement(ScalarField field, Domain domain, NormEstimate norms)
      : field_(std::move(field)), domain_(std::move(domain)), norms_(std::move(norms)) {}

  ScalarField field_;
  Domain domain_;
  NormEstimate norms_;
};

/// First violated clause, checked in the order smoothness, slip-norm,
/// sup-norm, sign; `violated` lists every failing clause.
struct Rejection {
  std::string clause;  // "smoothness" | "slip-norm" | "sup-norm" | "sign"
  Vec witness;
  double value = 0.0;
  std::string message;
  std::vector<std::string> violated;
};

using Certification = std::variant<ConeElement, Rejection>;

/// Membership test for the cone of nonnegative bounded C^1 semi-Lipschitz
/// functions, on the domain points.
Certification cone_certify(const ScalarField& f, const Domain& domain);
/// cone_certify, raising InvalidStructure with the rejection message.
ConeElement certify(const ScalarField& f, const Domain& domain);

ConeElement cone_sum(const ConeElement& a, const ConeElement& b);
/// lambda >= 0.
ConeElement cone_scale(const ConeElement& a, double lambda);
/// Product rule derivative; the result is re-certified. ChartMismatch when
/// the domains differ.
ConeElement cone_product(const ConeElement& a, const ConeElement& b);
/// hemi(ab) <= K hemi(a) hemi(b) + slack on the estimates.
bool within_product_bound(const ConeElement& a, const ConeElement& b, const ConeElement& ab,
                          double slack = 1e-9);

/// Formal difference positive - negative of two cone elements.
class SpanElement {
 public:
  SpanElement(ConeElement positive, ConeElement negative);
  static SpanElement from_cone(const ConeElement& a);

  const ConeElement& positive() const noexcept { return positive_; }
  const ConeElement& negative() const noexcept { return negative_; }
  const Domain& domain() const noexcept { return positive_.domain(); }
  double operator()(const Vec& x) const { return positive_(x) - negative_(x); }
  ScalarField field() const { return positive_.field() - negative_.field(); }

  SpanElement operator+(const SpanElement& other) const;
  SpanElement operator-(const SpanElement& other) const;
  /// Any real factor; negative factors swap the parts.
  SpanElement scaled(double factor) const;
  /// (g1 - h1)(g2 - h2) = (g1 g2 + h1 h2) - (g1 h2 + h1 g2).
  SpanElement operator*(const SpanElement& other) const;

  nlohmann::json to_json() const;

 private:
  ConeElement positive_;
  ConeElement negative_;
};

/// hemi-norm of the represented function when it certifies, else +infinity.
double extended_norm(const SpanElement& s);

/// Pointwise equality of two span elements on the shared domain points.
bool equal_on_domain(const SpanElement& a, const SpanElement& b, double tolerance = 1e-12);

/// For a >= 1 on the domain: 1/a represented as 1 - (1 - 1/a), where both
/// parts are cone elements and 0 < 1/a <= 1. Precondition error otherwise.
SpanElement bounded_inversion(const ConeElement& a);

/// Finite combination of point evaluations.
struct Functional {
  std::vector<std::pair<Vec, double>> atoms;

  Functional operator+(const Functional& other) const;
  Functional operator-(const Functional& other) const;
  Functional scaled(double factor) const;
  nlohmann::json to_json() const;
};

Functional eval_functional(const FinslerChart& chart, const Vec& x);
double functional_apply(const Functional& phi, const ScalarField& f);
double functional_apply(const Functional& phi, const SpanElement& s);

struct DualBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::string upper_method;
  double upper_error = 0.0;
  int dictionary_size = 0;
  Vec best_center;
  std::vector<std::string> notes;
};

/// Bracket for the dual norm of delta_y - delta_x. The upper end is the
/// chart distance d(x, y). The lower end is the largest value of the
/// functional on a dictionary of smoothed truncated distance functions
/// min{d(c, .), 1} (c = x plus 8 perturbed centers), each normalized to
/// hemi-norm at most 1 by max(measured hemi-norm, 1 + eps).
DualBracket dual_norm_bracket(const FinslerChart& chart, const Vec& x, const Vec& y, double eps);

nlohmann::json to_json(const NormEstimate& norms);
nlohmann::json to_json(const Rejection& rejection);
nlohmann::json to_json(const DualBracket& bracket);

}  // namespace finslerq::conealg
