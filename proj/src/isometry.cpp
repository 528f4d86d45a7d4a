#include "finslerq/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "finslerq/codec.hpp"
#include "finslerq/errors.hpp"

namespace finslerq::isometry {

using nlohmann::json;

FinslerIsometryReport check_finsler_isometry(const FinslerChart& x_chart, const FinslerChart& y_chart,
                                             const SmoothMap& h,
                                             const std::vector<TangentSample>& samples, double tol) {
  if (samples.empty()) throw Error(ErrorKind::DegenerateInput, "isometry check needs tangent samples");
  if (h.dimension() != x_chart.dimension() || h.dimension() != y_chart.dimension()) {
    throw Error(ErrorKind::MalformedInput, "map and chart dimensions differ");
  }
  FinslerIsometryReport report;
  report.tol = tol;
  for (const auto& [x, v] : samples) {
    x_chart.require_inside(x, "tangent base point");
    if (v.isZero(0.0)) throw Error(ErrorKind::Precondition, "tangent samples need v != 0");
    const Vec hx = h(x);
    y_chart.require_inside(hx, "image of tangent base point");
    const double f = x_chart.field()(x, v);
    const double g = y_chart.field()(hx, h.jacobian(x) * v);
    const double defect = std::abs(f - g) / f;
    if (defect > report.max_defect || report.worst_x.size() == 0) {
      report.max_defect = defect;
      report.worst_x = x;
      report.worst_v = v;
    }
  }
  report.pass = report.max_defect <= tol;
  return report;
}

MetricIsometryReport check_metric_isometry(const FinslerChart& x_chart, const FinslerChart& y_chart,
                                           const SmoothMap& h, const std::vector<PointPair>& pairs,
                                           double tol, DistanceMethod method) {
  if (pairs.empty()) throw Error(ErrorKind::DegenerateInput, "isometry check needs sample pairs");
  MetricIsometryReport report;
  report.tol = tol;
  report.pass = true;
  std::vector<TangentSample> tangents;
  for (const auto& [p, q] : pairs) {
    const auto dx = finsler::finsler_distance(x_chart, p, q, method);
    const auto dy = finsler::finsler_distance(y_chart, h(p), h(q), method);
    const double defect = std::abs(dx.value - dy.value);
    const double allowance = dx.error_estimate + dy.error_estimate;
    if (defect > report.max_defect || report.worst_p.size() == 0) {
      report.max_defect = defect;
      report.allowance = allowance;
      report.worst_p = p;
      report.worst_q = q;
    }
    if (defect > tol + allowance) report.pass = false;
    if (p != q) {
      tangents.emplace_back(p, q - p);
      tangents.emplace_back(p, p - q);
    }
  }
  if (!tangents.empty()) {
    report.infinitesimal = check_finsler_isometry(x_chart, y_chart, h, tangents, tol);
    report.agrees_with_infinitesimal = report.infinitesimal.pass == report.pass;
  }
  return report;
}

MapSlipConstants map_slip_constants(const SmoothMap& h, const FinslerChart& x_chart,
                                    const FinslerChart& y_chart, const std::vector<PointPair>& pairs,
                                    DistanceMethod method) {
  MapSlipConstants slips;
  for (const auto& [p, q] : pairs) {
    const double dx = finsler::finsler_distance(x_chart, p, q, method).value;
    const double dy = finsler::finsler_distance(y_chart, h(p), h(q), method).value;
    if (!(dx > 0.0) || !(dy > 0.0)) continue;
    if (dy / dx > slips.forward) {
      slips.forward = dy / dx;
      slips.forward_witness = {p, q};
    }
    if (dx / dy > slips.backward) {
      slips.backward = dx / dy;
      slips.backward_witness = {p, q};
    }
  }
  return slips;
}

CompositionOperator::CompositionOperator(SmoothMap h, Domain x_domain, Domain y_domain)
    : h_(std::move(h)), x_domain_(std::move(x_domain)), y_domain_(std::move(y_domain)) {
  if (!x_domain_ || !y_domain_) throw Error(ErrorKind::MalformedInput, "composition needs both domains");
  if (h_.dimension() != x_domain_->chart.dimension() || h_.dimension() != y_domain_->chart.dimension()) {
    throw Error(ErrorKind::MalformedInput, "map and chart dimensions differ");
  }
}

CompositionOperator CompositionOperator::with_pushforward(SmoothMap h, Domain x_domain,
                                                          const FinslerChart& y_chart) {
  std::vector<Vec> images;
  images.reserve(x_domain->points.size());
  for (const Vec& x : x_domain->points) images.push_back(h(x));
  Domain y_domain = conealg::make_domain(y_chart, std::move(images));
  return {std::move(h), std::move(x_domain), std::move(y_domain)};
}

ConeElement CompositionOperator::apply(const ConeElement& f) const {
  if (f.domain() != y_domain_) {
    throw Error(ErrorKind::ChartMismatch, "operand does not live on the operator's target domain");
  }
  return conealg::certify(apply(f.field()), x_domain_);
}

conealg::SpanElement CompositionOperator::apply(const conealg::SpanElement& s) const {
  return {apply(s.positive()), apply(s.negative())};
}

conealg::Functional CompositionOperator::adjoint(const conealg::Functional& phi) const {
  conealg::Functional out;
  for (const auto& [x, c] : phi.atoms) out.atoms.emplace_back(h_(x), c);
  return out;
}

CompositionOperator CompositionOperator::inverse() const {
  return {h_.inverted(), y_domain_, x_domain_};
}

OperatorNormEstimate operator_norm_estimate(const CompositionOperator& t,
                                            const std::vector<ConeElement>& dictionary) {
  if (dictionary.empty()) throw Error(ErrorKind::DegenerateInput, "operator norm needs a dictionary");
  OperatorNormEstimate estimate;
  for (std::size_t k = 0; k < dictionary.size(); ++k) {
    const double base = dictionary[k].hemi_norm();
    if (!(base > 0.0)) {
      estimate.notes.push_back("element " + std::to_string(k) + " has zero hemi-norm; skipped");
      continue;
    }
    const auto image = conealg::cone_certify(t.apply(dictionary[k].field()), t.x_domain());
    if (const auto* rejection = std::get_if<conealg::Rejection>(&image)) {
      estimate.notes.push_back("element " + std::to_string(k) + " image rejected: " + rejection->clause);
      continue;
    }
    const double ratio = std::get<ConeElement>(image).hemi_norm() / base;
    if (ratio > estimate.value || estimate.argmax < 0) {
      estimate.value = ratio;
      estimate.argmax = static_cast<int>(k);
    }
  }
  return estimate;
}

std::vector<ConeElement> standard_dictionary(const Domain& domain) {
  const auto& points = domain->points;
  const Vec center = points[points.size() / 2];
  const int n = domain->chart.dimension();
  std::vector<ScalarField> gentle;
  std::vector<ScalarField> fields{ScalarField::constant(1.0)};
  for (int axis = 0; axis < n; ++axis) {
    for (double sign : {1.0, -1.0}) {
      for (double scale : {1.0, 1e3}) {
        const auto f = ScalarField::arctan(sign, scale, -scale * center[axis], std::numbers::pi / 2, axis);
        fields.push_back(f);
        if (scale == 1.0) gentle.push_back(f);
      }
    }
  }
  for (std::size_t i = 0; i < gentle.size(); ++i) {
    for (std::size_t j = i; j < gentle.size(); ++j) fields.push_back(gentle[i].times(gentle[j]));
  }
  if (domain->chart.field().is_constant()) {
    fields.push_back(ScalarField::smooth_truncated_distance(domain->chart.field(), center, 0.1));
  }
  std::vector<ConeElement> dictionary;
  for (const auto& f : fields) dictionary.push_back(conealg::certify(f, domain));
  return dictionary;
}

namespace {

std::vector<Vec> unit_directions(int n) {
  std::vector<Vec> dirs;
  if (n == 1) return {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  if (n == 2) {
    for (int k = 0; k < 64; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 64;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
    return dirs;
  }
  for (int axis = 0; axis < n; ++axis) {
    dirs.push_back(Vec::Unit(n, axis));
    dirs.push_back(-Vec::Unit(n, axis));
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < 64; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / 64;
      const double r = std::sqrt(1.0 - z * z);
      Vec v(3);
      v << r * std::cos(golden * k), r * std::sin(golden * k), z;
      dirs.push_back(v);
    }
  }
  return dirs;
}

// pi/2 + atan(scale <w, y - y0>).
ScalarField ridge(const Vec& y0, const Vec& w, double scale) {
  const int n = static_cast<int>(w.size());
  const double len = w.norm();
  if (n == 1) return ScalarField::arctan(1.0, scale * w[0], -scale * w[0] * y0[0], std::numbers::pi / 2);
  const Mat q = Eigen::HouseholderQR<Mat>(Mat(w / len)).householderQ();
  Mat m = q.transpose();
  if (m.row(0).dot(w) < 0.0) m.row(0) *= -1.0;
  return ScalarField::arctan(1.0, scale * len, 0.0, std::numbers::pi / 2, 0)
      .compose(SmoothMap::affine(m, -m * y0));
}

}  // namespace

std::vector<ConeElement> matched_dictionary(const CompositionOperator& t, int count) {
  const auto& x_chart = t.x_domain()->chart;
  const auto& y_field = t.y_domain()->chart.field();
  struct Candidate {
    double stretch;
    std::size_t point;
    Vec v;
  };
  std::vector<Candidate> best;
  const auto dirs = unit_directions(x_chart.dimension());
  const auto& points = t.x_domain()->points;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec& x = points[k];
    const Vec hx = t.map()(x);
    const Mat jac = t.map().jacobian(x);
    Candidate top{-1.0, k, Vec()};
    for (const Vec& v : dirs) {
      const double stretch = y_field(hx, jac * v) / x_chart.field()(x, v);
      if (stretch > top.stretch) top = {stretch, k, v};
    }
    best.push_back(std::move(top));
  }
  const std::size_t keep = std::min<std::size_t>(best.size(), static_cast<std::size_t>(std::max(count, 0)));
  std::partial_sort(best.begin(), best.begin() + keep, best.end(),
                    [](const Candidate& a, const Candidate& b) { return a.stretch > b.stretch; });
  std::vector<ConeElement> dictionary;
  for (std::size_t i = 0; i < keep; ++i) {
    const Vec& x = points[best[i].point];
    const Vec hx = t.map()(x);
    // w is dual to the image direction: <w, u> = G(u) with G-dual norm 1.
    const Vec w = y_field.gradient_v(hx, t.map().jacobian(x) * best[i].v);
    const auto certified = conealg::cone_certify(ridge(hx, w, 1e3), t.y_domain());
    if (const auto* element = std::get_if<ConeElement>(&certified)) dictionary.push_back(*element);
  }
  return dictionary;
}

namespace {

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::vector<Vec> probe_points(const Domain& domain) {
  const auto& points = domain->points;
  const std::size_t stride = std::max<std::size_t>(1, points.size() / 64);
  std::vector<Vec> probes;
  for (std::size_t k = 0; k < points.size(); k += stride) probes.push_back(points[k]);
  return probes;
}

}  // namespace

MyersNakaiReport myers_nakai_consistency(const CompositionOperator& t,
                                         const std::vector<ConeElement>& y_dictionary,
                                         const std::vector<ConeElement>& x_dictionary,
                                         const std::vector<PointPair>& pairs,
                                         const std::vector<TangentSample>& tangents, double tol) {
  if (y_dictionary.size() < 2) throw Error(ErrorKind::DegenerateInput, "dictionary needs >= 2 elements");
  MyersNakaiReport report;
  report.tol = tol;
  const auto probes = probe_points(t.x_domain());

  // (a) Evaluation identities of T f = f o h and its adjoint.
  conealg::Functional phi;
  phi.atoms = {{probes.front(), -1.0}, {probes.back(), 1.0}, {probes[probes.size() / 2], 0.5}};
  const conealg::Functional pulled = t.adjoint(phi);
  for (std::size_t i = 0; i < y_dictionary.size(); ++i) {
    const ScalarField& f = y_dictionary[i].field();
    const ScalarField& g = y_dictionary[(i + 1) % y_dictionary.size()].field();
    const ScalarField tf = t.apply(f);
    const ScalarField tg = t.apply(g);
    const ScalarField t_combo = t.apply(f.scaled(-1.3) + g);
    const ScalarField t_product = t.apply(f.times(g));
    for (const Vec& x : probes) {
      report.linearity_defect =
          std::max(report.linearity_defect, relative_gap(t_combo(x), -1.3 * tf(x) + tg(x)));
      report.multiplicativity_defect =
          std::max(report.multiplicativity_defect, relative_gap(t_product(x), tf(x) * tg(x)));
    }
    report.duality_defect = std::max(
        report.duality_defect,
        relative_gap(conealg::functional_apply(pulled, f), conealg::functional_apply(phi, tf)));
  }
  {
    const auto s = conealg::SpanElement::from_cone(y_dictionary[0]) -
                   conealg::SpanElement::from_cone(y_dictionary[1]);
    const auto ts = t.apply(s);
    for (const Vec& x : probes) {
      report.linearity_defect = std::max(report.linearity_defect, relative_gap(ts(x), s(t.map()(x))));
    }
  }
  report.algebra_pass = report.linearity_defect <= 1e-12 && report.multiplicativity_defect <= 1e-12 &&
                        report.duality_defect <= 1e-12;

  // (b) Semi-Lipschitz constants of h and h^-1 against ||T| and ||T^-1|.
  report.slips = map_slip_constants(t.map(), t.x_domain()->chart, t.y_domain()->chart, pairs);
  // Matched ridges sit where the sampled stretch of h (resp. h^-1) peaks, so
  // both sides of each inequality look at the same points.
  const CompositionOperator inverse = t.inverse();
  auto forward_dictionary = y_dictionary;
  auto inverse_dictionary = x_dictionary;
  for (auto& e : matched_dictionary(t)) forward_dictionary.push_back(std::move(e));
  for (auto& e : matched_dictionary(inverse)) inverse_dictionary.push_back(std::move(e));
  report.forward_norm = operator_norm_estimate(t, forward_dictionary);
  report.inverse_norm = operator_norm_estimate(inverse, inverse_dictionary);
  report.bounds_pass = report.slips.forward <= report.forward_norm.value + tol &&
                       report.slips.backward <= report.inverse_norm.value + tol;

  // (c) Norm preservation versus the infinitesimal isometry check.
  report.isometry = check_finsler_isometry(t.x_domain()->chart, t.y_domain()->chart, t.map(), tangents, tol);
  for (const auto& f : y_dictionary) {
    if (!(f.hemi_norm() > 0.0)) continue;
    const double image = conealg::certify(t.apply(f.field()), t.x_domain()).hemi_norm();
    report.norm_preservation_defect =
        std::max(report.norm_preservation_defect, std::abs(image - f.hemi_norm()) / f.hemi_norm());
  }
  report.norms_preserved = report.norm_preservation_defect <= tol;
  report.preservation_consistent = report.norms_preserved == report.isometry.pass;
  report.pass = report.algebra_pass && report.bounds_pass && report.preservation_consistent;
  return report;
}

std::string to_string(SignVerdict verdict) {
  switch (verdict) {
    case SignVerdict::Compatible: return "compatible";
    case SignVerdict::Incompatible: return "incompatible";
    case SignVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

bool zero_evidenced(const quasimetric::SymmetryReport& r) {
  return (r.is_exact && r.index == 0.0) || r.evidence == quasimetric::SymmetryEvidence::DecayingToZero;
}

bool positive_certified(const quasimetric::SymmetryReport& r) {
  return (r.is_exact && r.index > 0.0) || (r.certified_lower && *r.certified_lower > 0.0);
}

}  // namespace

SignCompatibility symmetry_sign_compatibility(const quasimetric::SymmetryReport& x_report,
                                              const quasimetric::SymmetryReport& y_report) {
  const bool x_zero = zero_evidenced(x_report);
  const bool y_zero = zero_evidenced(y_report);
  const bool x_positive = positive_certified(x_report);
  const bool y_positive = positive_certified(y_report);
  if ((x_zero && y_positive) || (y_zero && x_positive)) {
    return {SignVerdict::Incompatible,
            "one index is evidenced to be 0 and the other has a positive certified lower bound; "
            "no bi-semi-Lipschitz map can exist"};
  }
  if (x_positive && y_positive) return {SignVerdict::Compatible, "both indices are certified positive"};
  if (x_zero && y_zero) return {SignVerdict::Compatible, "both indices are evidenced to be 0"};
  return {SignVerdict::Inconclusive, "the sign of at least one index is not certified"};
}

json to_json(const FinslerIsometryReport& report) {
  json out{{"max_defect", codec::number(report.max_defect)},
           {"tol", report.tol},
           {"pass", report.pass},
           {"jacobian", report.jacobian}};
  if (report.worst_x.size() > 0) {
    out["witness"] = {{"x", codec::vec_to_json(report.worst_x)}, {"v", codec::vec_to_json(report.worst_v)}};
  }
  return out;
}

json to_json(const MetricIsometryReport& report) {
  json out{{"max_defect", codec::number(report.max_defect)},
           {"allowance", codec::number(report.allowance)},
           {"tol", report.tol},
           {"pass", report.pass},
           {"infinitesimal", to_json(report.infinitesimal)},
           {"agrees_with_infinitesimal", report.agrees_with_infinitesimal}};
  if (report.worst_p.size() > 0) {
    out["witness"] = {codec::vec_to_json(report.worst_p), codec::vec_to_json(report.worst_q)};
  }
  return out;
}

json to_json(const MapSlipConstants& slips) {
  json out{{"forward", codec::number(slips.forward)}, {"backward", codec::number(slips.backward)}};
  if (slips.forward_witness.first.size() > 0) {
    out["forward_witness"] = {codec::vec_to_json(slips.forward_witness.first),
                              codec::vec_to_json(slips.forward_witness.second)};
  }
  if (slips.backward_witness.first.size() > 0) {
    out["backward_witness"] = {codec::vec_to_json(slips.backward_witness.first),
                               codec::vec_to_json(slips.backward_witness.second)};
  }
  return out;
}

json to_json(const OperatorNormEstimate& estimate) {
  return {{"value", codec::number(estimate.value)},
          {"argmax", estimate.argmax},
          {"notes", estimate.notes},
          {"estimate", "dictionary lower bound"}};
}

json to_json(const MyersNakaiReport& report) {
  return {{"algebra",
           {{"linearity_defect", report.linearity_defect},
            {"multiplicativity_defect", report.multiplicativity_defect},
            {"duality_defect", report.duality_defect},
            {"pass", report.algebra_pass}}},
          {"bounds",
           {{"slips", to_json(report.slips)},
            {"forward_norm", to_json(report.forward_norm)},
            {"inverse_norm", to_json(report.inverse_norm)},
            {"pass", report.bounds_pass}}},
          {"preservation",
           {{"isometry", to_json(report.isometry)},
            {"norm_defect", codec::number(report.norm_preservation_defect)},
            {"norms_preserved", report.norms_preserved},
            {"consistent", report.preservation_consistent}}},
          {"tol", report.tol},
          {"pass", report.pass}};
}

json to_json(const SignCompatibility& verdict) {
  return {{"verdict", to_string(verdict.verdict)}, {"reason", verdict.reason}};
}

}  // namespace finslerq::isometry
