#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "finslerq/conealg.hpp"
#include "finslerq/finsler.hpp"
#include "finslerq/quasimetric.hpp"
#include "finslerq/smooth_map.hpp"

namespace finslerq::isometry {

using conealg::ConeElement;
using conealg::Domain;
using finsler::DistanceMethod;
using finsler::FinslerChart;
using finsler::PointPair;
using semilip::ScalarField;

/// (x, v) with v != 0.
using TangentSample = std::pair<Vec, Vec>;

struct FinslerIsometryReport {
  double max_defect = 0.0;  // max |F(x,v) - G(h(x), dh(x) v)| / F(x,v)
  Vec worst_x;
  Vec worst_v;
  double tol = 0.0;
  bool pass = true;
  std::string jacobian = "analytic";
};

FinslerIsometryReport check_finsler_isometry(const FinslerChart& x_chart, const FinslerChart& y_chart,
                                             const SmoothMap& h,
                                             const std::vector<TangentSample>& samples, double tol);

struct MetricIsometryReport {
  double max_defect = 0.0;  // max |d_X(p,q) - d_Y(h(p),h(q))|
  double allowance = 0.0;   // distance-op error bounds at the worst pair
  Vec worst_p;
  Vec worst_q;
  double tol = 0.0;
  bool pass = true;
  // Infinitesimal check on (p, +-(q - p)) for every pair, at the same tol.
  FinslerIsometryReport infinitesimal;
  bool agrees_with_infinitesimal = true;
};

MetricIsometryReport check_metric_isometry(const FinslerChart& x_chart, const FinslerChart& y_chart,
                                           const SmoothMap& h, const std::vector<PointPair>& pairs,
                                           double tol, DistanceMethod method = DistanceMethod::Auto);

struct MapSlipConstants {
  double forward = 0.0;   // sup d_Y(h p, h q) / d_X(p, q)
  double backward = 0.0;  // sup d_X(p, q) / d_Y(h p, h q)
  PointPair forward_witness;
  PointPair backward_witness;
};

/// Empirical (lower-bound) semi-Lipschitz constants of h and h^-1 on the
/// same pair set. Pairs with zero distance on either side are skipped.
MapSlipConstants map_slip_constants(const SmoothMap& h, const FinslerChart& x_chart,
                                    const FinslerChart& y_chart, const std::vector<PointPair>& pairs,
                                    DistanceMethod method = DistanceMethod::Auto);

/// T f = f o h from functions on Y to functions on X.
class CompositionOperator {
 public:
  /// Explicit domains: `x_domain` carries T f, `y_domain` carries f.
  CompositionOperator(SmoothMap h, Domain x_domain, Domain y_domain);
  /// Y-domain points are the images h(x) of the X-domain points, so both
  /// sides of every comparison are evaluated on matched samples.
  static CompositionOperator with_pushforward(SmoothMap h, Domain x_domain, const FinslerChart& y_chart);

  const SmoothMap& map() const noexcept { return h_; }
  const Domain& x_domain() const noexcept { return x_domain_; }
  const Domain& y_domain() const noexcept { return y_domain_; }

  ScalarField apply(const ScalarField& f) const { return f.compose(h_); }
  /// Re-certifies f o h on the X domain; ChartMismatch if f lives elsewhere.
  ConeElement apply(const ConeElement& f) const;
  conealg::SpanElement apply(const conealg::SpanElement& s) const;
  /// Atom precomposition delta_x -> delta_{h(x)}.
  conealg::Functional adjoint(const conealg::Functional& phi) const;
  /// g -> g o h^-1 with the domains swapped.
  CompositionOperator inverse() const;

 private:
  SmoothMap h_;
  Domain x_domain_;
  Domain y_domain_;
};

struct OperatorNormEstimate {
  double value = 0.0;  // max hemi(T f) / hemi(f); a lower bound of ||T|
  int argmax = -1;
  std::vector<std::string> notes;
};

OperatorNormEstimate operator_norm_estimate(const CompositionOperator& t,
                                            const std::vector<ConeElement>& dictionary);

/// Constant 1, pi/2 +- atan along every axis, gentle and steep (scale 1e3)
/// variants centered at the middle domain point, their pairwise products,
/// and smoothed truncated distances for constant charts.
std::vector<ConeElement> standard_dictionary(const Domain& domain);

/// Steep ridges pi/2 + atan(1e3 <w, y - h(x)>) at the `count` domain points
/// x where the sampled stretch G(h x, dh v) / F(x, v) is largest, with w the
/// G-dual direction of dh v. Their operator ratios approach that stretch.
std::vector<ConeElement> matched_dictionary(const CompositionOperator& t, int count = 3);

/// Clause (b) compares against dictionaries extended by matched_dictionary.
struct MyersNakaiReport {
  // (a) evaluation identities
  double linearity_defect = 0.0;
  double multiplicativity_defect = 0.0;
  double duality_defect = 0.0;
  bool algebra_pass = true;
  // (b) slip constants against operator-norm estimates on matched samples
  MapSlipConstants slips;
  OperatorNormEstimate forward_norm;
  OperatorNormEstimate inverse_norm;
  bool bounds_pass = true;
  // (c) norm preservation against the infinitesimal isometry check
  FinslerIsometryReport isometry;
  double norm_preservation_defect = 0.0;  // max |hemi(Tf) - hemi(f)| / hemi(f)
  bool norms_preserved = true;
  bool preservation_consistent = true;  // norms_preserved == isometry.pass
  double tol = 0.0;
  bool pass = true;  // algebra_pass && bounds_pass && preservation_consistent
};

MyersNakaiReport myers_nakai_consistency(const CompositionOperator& t,
                                         const std::vector<ConeElement>& y_dictionary,
                                         const std::vector<ConeElement>& x_dictionary,
                                         const std::vector<PointPair>& pairs,
                                         const std::vector<TangentSample>& tangents, double tol);

enum class SignVerdict { Compatible, Incompatible, Inconclusive };

std::string to_string(SignVerdict verdict);

struct SignCompatibility {
  SignVerdict verdict = SignVerdict::Inconclusive;
  std::string reason;
};

/// Zero evidence: exact index 0 or a decaying ratio sequence. Positive
/// evidence: exact positive index or a positive certified lower bound.
SignCompatibility symmetry_sign_compatibility(const quasimetric::SymmetryReport& x_report,
                                              const quasimetric::SymmetryReport& y_report);

nlohmann::json to_json(const FinslerIsometryReport& report);
nlohmann::json to_json(const MetricIsometryReport& report);
nlohmann::json to_json(const MapSlipConstants& slips);
nlohmann::json to_json(const OperatorNormEstimate& estimate);
nlohmann::json to_json(const MyersNakaiReport& report);
nlohmann::json to_json(const SignCompatibility& verdict);

}  // namespace finslerq::isometry
