#include "finslerq/conealg.hpp"

#include <algorithm>
#include <cmath>

#include "finslerq/codec.hpp"
#include "finslerq/errors.hpp"
#include "finslerq/semilip.hpp"

namespace finslerq::conealg {

using nlohmann::json;

class ConeAccess {
 public:
  static ConeElement make(ScalarField f, Domain domain, NormEstimate norms) {
    return {std::move(f), std::move(domain), std::move(norms)};
  }
};

Domain make_domain(FinslerChart chart, std::vector<Vec> points) {
  if (points.empty()) throw Error(ErrorKind::DegenerateInput, "certification domain needs points");
  for (const Vec& p : points) chart.require_inside(p, "certification point");
  return std::make_shared<const CertificationDomain>(
      CertificationDomain{std::move(chart), std::move(points)});
}

Domain grid_domain(const FinslerChart& chart) {
  std::vector<Vec> points;
  points.reserve(chart.node_count());
  for (std::size_t k = 0; k < chart.node_count(); ++k) points.push_back(chart.node(k));
  return make_domain(chart, std::move(points));
}

Domain example31_domain() {
  static const Domain domain = [] {
    std::vector<double> xs{0.0};
    for (int k = 0; k <= 11 * 40; ++k) {
      const double t = std::pow(10.0, -3.0 + k / 40.0);
      xs.push_back(t);
      xs.push_back(-t);
    }
    for (int k = -500; k <= 500; ++k) xs.push_back(0.01 * k);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<Vec> points;
    for (double x : xs) points.push_back(Vec::Constant(1, x));
    finsler::FinslerChart chart({Vec::Constant(1, -1e8), Vec::Constant(1, 1e8)},
                                finsler::MinkowskiNormField::example31(), {2});
    return make_domain(std::move(chart), std::move(points));
  }();
  return domain;
}

NormEstimate estimate_norms(const ScalarField& f, const CertificationDomain& domain) {
  NormEstimate norms;
  norms.min_value = kInf;
  std::vector<double> magnitudes;
  magnitudes.reserve(domain.points.size());
  for (const Vec& p : domain.points) {
    const double value = f(p);
    magnitudes.push_back(std::abs(value));
    if (std::abs(value) > norms.sup_norm || norms.sup_at.size() == 0) {
      norms.sup_norm = std::abs(value);
      norms.sup_at = p;
    }
    if (value < norms.min_value) {
      norms.min_value = value;
      norms.min_at = p;
    }
  }
  if (semilip::is_diverging(magnitudes)) norms.sup_norm = kInf;
  const auto profile = semilip::sup_derivative_norm(domain.chart, f, domain.points);
  norms.slip_norm = profile.supremum;
  norms.slip_at = profile.argmax;
  return norms;
}

Certification cone_certify(const ScalarField& f, const Domain& domain) {
  if (!domain) throw Error(ErrorKind::MalformedInput, "missing certification domain");
  if (!f.is_c1()) {
    return Rejection{"smoothness", Vec(), 0.0, "field is not C^1 (" + semilip::to_string(f.kind()) + ")",
                     {"smoothness"}};
  }
  NormEstimate norms = estimate_norms(f, *domain);
  std::vector<Rejection> failures;
  if (!std::isfinite(norms.slip_norm)) {
    failures.push_back({"slip-norm", norms.slip_at, norms.slip_norm,
                        "derivative norm diverges: infinite semi-Lipschitz constant", {}});
  }
  if (!std::isfinite(norms.sup_norm)) {
    failures.push_back({"sup-norm", norms.sup_at, norms.sup_norm, "field is unbounded", {}});
  }
  if (!(norms.min_value >= -kNonnegativeSlack)) {
    failures.push_back({"sign", norms.min_at, norms.min_value, "field takes negative values", {}});
  }
  if (!failures.empty()) {
    Rejection rejection = failures.front();
    for (const auto& failure : failures) rejection.violated.push_back(failure.clause);
    return rejection;
  }
  return ConeAccess::make(f, domain, std::move(norms));
}

ConeElement certify(const ScalarField& f, const Domain& domain) {
  auto result = cone_certify(f, domain);
  if (auto* rejection = std::get_if<Rejection>(&result)) {
    throw Error(ErrorKind::InvalidStructure, "not a cone element: " + rejection->clause + ": " + rejection->message);
  }
  return std::get<ConeElement>(std::move(result));
}

namespace {

void require_same_domain(const ConeElement& a, const ConeElement& b) {
  if (a.domain() != b.domain()) {
    throw Error(ErrorKind::ChartMismatch, "cone elements live on different certification domains");
  }
}

}  // namespace

ConeElement cone_sum(const ConeElement& a, const ConeElement& b) {
  require_same_domain(a, b);
  return certify(a.field() + b.field(), a.domain());
}

ConeElement cone_scale(const ConeElement& a, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::Precondition, "cone scaling needs lambda >= 0");
  return certify(a.field().scaled(lambda), a.domain());
}

ConeElement cone_product(const ConeElement& a, const ConeElement& b) {
  require_same_domain(a, b);
  return certify(a.field().times(b.field()), a.domain());
}

bool within_product_bound(const ConeElement& a, const ConeElement& b, const ConeElement& ab,
                          double slack) {
  return ab.hemi_norm() <= kProductConstant * a.hemi_norm() * b.hemi_norm() + slack;
}

json ConeElement::to_json() const {
  return {{"field", field_.to_json()}, {"norms", conealg::to_json(norms_)}, {"nonnegative", true}};
}

SpanElement::SpanElement(ConeElement positive, ConeElement negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {
  require_same_domain(positive_, negative_);
}

SpanElement SpanElement::from_cone(const ConeElement& a) {
  return {a, certify(ScalarField::constant(0.0), a.domain())};
}

SpanElement SpanElement::operator+(const SpanElement& other) const {
  return {cone_sum(positive_, other.positive_), cone_sum(negative_, other.negative_)};
}

SpanElement SpanElement::operator-(const SpanElement& other) const {
  return {cone_sum(positive_, other.negative_), cone_sum(negative_, other.positive_)};
}

SpanElement SpanElement::scaled(double factor) const {
  if (factor >= 0.0) return {cone_scale(positive_, factor), cone_scale(negative_, factor)};
  return {cone_scale(negative_, -factor), cone_scale(positive_, -factor)};
}

SpanElement SpanElement::operator*(const SpanElement& other) const {
  const auto& g1 = positive_;
  const auto& h1 = negative_;
  const auto& g2 = other.positive_;
  const auto& h2 = other.negative_;
  return {cone_sum(cone_product(g1, g2), cone_product(h1, h2)),
          cone_sum(cone_product(g1, h2), cone_product(h1, g2))};
}

json SpanElement::to_json() const {
  return {{"positive", positive_.to_json()},
          {"negative", negative_.to_json()},
          {"extended_norm", codec::number(extended_norm(*this))}};
}

double extended_norm(const SpanElement& s) {
  const auto result = cone_certify(s.field(), s.domain());
  if (const auto* element = std::get_if<ConeElement>(&result)) return element->hemi_norm();
  return kInf;
}

bool equal_on_domain(const SpanElement& a, const SpanElement& b, double tolerance) {
  if (a.domain() != b.domain()) {
    throw Error(ErrorKind::ChartMismatch, "span elements live on different certification domains");
  }
  for (const Vec& p : a.domain()->points) {
    const double u = a(p);
    const double v = b(p);
    if (std::abs(u - v) > tolerance * (1.0 + std::max(std::abs(u), std::abs(v)))) return false;
  }
  return true;
}

SpanElement bounded_inversion(const ConeElement& a) {
  if (!(a.norms().min_value >= 1.0)) {
    throw Error(ErrorKind::Precondition,
                "bounded inversion needs a >= 1 on the domain (minimum " +
                    std::to_string(a.norms().min_value) + ")");
  }
  const ScalarField one = ScalarField::constant(1.0);
  return {certify(one, a.domain()), certify(one - a.field().reciprocal(), a.domain())};
}

Functional Functional::operator+(const Functional& other) const {
  Functional out = *this;
  out.atoms.insert(out.atoms.end(), other.atoms.begin(), other.atoms.end());
  return out;
}

Functional Functional::operator-(const Functional& other) const { return *this + other.scaled(-1.0); }

Functional Functional::scaled(double factor) const {
  Functional out = *this;
  for (auto& atom : out.atoms) atom.second *= factor;
  return out;
}

json Functional::to_json() const {
  json atoms_json = json::array();
  for (const auto& [x, c] : atoms) {
    atoms_json.push_back({x.size() == 1 ? json(x[0]) : codec::vec_to_json(x), c});
  }
  return {{"atoms", atoms_json}};
}

Functional eval_functional(const FinslerChart& chart, const Vec& x) {
  chart.require_inside(x, "evaluation point");
  return {{{x, 1.0}}};
}

double functional_apply(const Functional& phi, const ScalarField& f) {
  double total = 0.0;
  for (const auto& [x, c] : phi.atoms) total += c * f(x);
  return total;
}

double functional_apply(const Functional& phi, const SpanElement& s) {
  double total = 0.0;
  for (const auto& [x, c] : phi.atoms) total += c * s(x);
  return total;
}

namespace {

constexpr double kTableStep = 1e-3;
constexpr double kTableMargin = 4.0;

std::vector<Vec> dictionary_centers(const FinslerChart& chart, const Vec& x, const Vec& y) {
  std::vector<Vec> centers{x};
  for (double t : {-0.5, -0.25, -0.1, -0.05, 0.05, 0.1, 0.25, 0.5}) {
    Vec c = x + t * (y - x);
    for (int i = 0; i < c.size(); ++i) c[i] = std::clamp(c[i], chart.box().lo[i], chart.box().hi[i]);
    centers.push_back(c);
  }
  return centers;
}

// Smoothed min{d(c, .), 1} on a 1-D chart, certified on its verification grid.
std::optional<ConeElement> truncated_distance_1d(const FinslerChart& chart, double c, double x,
                                                 double y, double eps) {
  const double lo = std::max(chart.box().lo[0], std::min({c, x, y}) - kTableMargin);
  const double hi = std::min(chart.box().hi[0], std::max({c, x, y}) + kTableMargin);
  const auto nodes = static_cast<std::size_t>(std::ceil((hi - lo) / kTableStep)) + 1;
  std::vector<double> xs(nodes);
  std::vector<double> ys(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    xs[k] = k + 1 == nodes ? hi : lo + k * (hi - lo) / (nodes - 1);
    const double d = finsler::finsler_distance(chart, Vec::Constant(1, c), Vec::Constant(1, xs[k])).value;
    ys[k] = std::min(d, 1.0);
  }
  const auto smoothing = semilip::smooth_approximate_1d(
      chart, ScalarField::tabulated_1d(std::move(xs), std::move(ys)), [eps](double) { return eps; }, eps);
  std::vector<Vec> points;
  for (double t : smoothing.grid) points.push_back(Vec::Constant(1, t));
  return certify(smoothing.g, make_domain(chart, std::move(points)));
}

}  // namespace

DualBracket dual_norm_bracket(const FinslerChart& chart, const Vec& x, const Vec& y, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorKind::MalformedInput, "eps must lie in (0, 1/2)");
  chart.require_inside(x, "bracket source");
  chart.require_inside(y, "bracket target");
  DualBracket bracket;
  if (x == y) {
    bracket.upper_method = "zero-functional";
    bracket.best_center = x;
    return bracket;
  }
  const auto distance = finsler::finsler_distance(chart, x, y);
  bracket.upper = distance.value;
  bracket.upper_method = distance.method;
  bracket.upper_error = distance.error_estimate;

  const Functional phi = eval_functional(chart, y) - eval_functional(chart, x);
  const double floor = 1.0 + eps;
  const auto consider = [&](const ConeElement& g, const Vec& center) {
    const double value = functional_apply(phi, g.field()) / std::max(g.hemi_norm(), floor);
    ++bracket.dictionary_size;
    if (value > bracket.lower) {
      bracket.lower = value;
      bracket.best_center = center;
    }
  };

  const auto centers = dictionary_centers(chart, x, y);
  if (chart.dimension() == 1) {
    for (std::size_t k = 0; k < centers.size(); ++k) {
      try {
        if (auto g = truncated_distance_1d(chart, centers[k][0], x[0], y[0], eps)) consider(*g, centers[k]);
      } catch (const Error& e) {
        if (k == 0) throw;
        bracket.notes.push_back("perturbed center skipped: " + std::string(e.what()));
      }
    }
  } else if (chart.field().is_constant()) {
    const Domain domain = grid_domain(chart);
    for (const Vec& c : centers) {
      consider(certify(ScalarField::smooth_truncated_distance(chart.field(), c, eps), domain), c);
    }
  } else {
    bracket.notes.push_back("no dictionary for multi-dimensional non-constant charts; lower bound 0");
  }
  if (bracket.lower > bracket.upper) {
    bracket.notes.push_back("lower end exceeds the computed distance");
  }
  return bracket;
}

json to_json(const NormEstimate& norms) {
  json out{{"sup_norm", codec::number(norms.sup_norm)},
           {"slip_norm", codec::number(norms.slip_norm)},
           {"hemi_norm", codec::number(norms.hemi())},
           {"min_value", codec::number(norms.min_value)},
           {"estimate", "grid lower bound"}};
  if (norms.sup_at.size() > 0) out["sup_at"] = codec::vec_to_json(norms.sup_at);
  if (norms.slip_at.size() > 0) out["slip_at"] = codec::vec_to_json(norms.slip_at);
  return out;
}

json to_json(const Rejection& rejection) {
  json out{{"clause", rejection.clause},
           {"value", codec::number(rejection.value)},
           {"message", rejection.message},
           {"violated", rejection.violated}};
  if (rejection.witness.size() > 0) out["witness"] = codec::vec_to_json(rejection.witness);
  return out;
}

json to_json(const DualBracket& bracket) {
  json out{{"lower", codec::number(bracket.lower)},
           {"upper", codec::number(bracket.upper)},
           {"upper_method", bracket.upper_method},
           {"upper_error", codec::number(bracket.upper_error)},
           {"dictionary_size", bracket.dictionary_size},
           {"notes", bracket.notes}};
  if (bracket.best_center.size() > 0) out["best_center"] = codec::vec_to_json(bracket.best_center);
  return out;
}

}  // namespace finslerq::conealg
