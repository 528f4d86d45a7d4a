#include "finslerq/scalar_field.hpp"

#include <algorithm>
#include <cmath>

#include "finslerq/codec.hpp"
#include "finslerq/errors.hpp"
#include "finslerq/quadrature.hpp"

namespace finslerq::semilip {

using nlohmann::json;

class ScalarField::Node {
 public:
  virtual ~Node() = default;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual json to_json() const = 0;
  virtual Kind kind() const = 0;
  virtual bool is_c1() const { return true; }
};

namespace {

using Node = ScalarField::Node;
using NodePtr = std::shared_ptr<const Node>;

Vec unit_gradient(const Vec& x, int axis, double value) {
  if (axis < 0 || axis >= x.size()) throw Error(ErrorKind::OutOfDomain, "axis beyond point dimension");
  Vec g = Vec::Zero(x.size());
  g[axis] = value;
  return g;
}

class ConstantNode final : public Node {
 public:
  explicit ConstantNode(double c) : c_(c) {}
  double value(const Vec&) const override { return c_; }
  Vec gradient(const Vec& x) const override { return Vec::Zero(x.size()); }
  json to_json() const override { return {{"family", "constant"}, {"params", {{"value", c_}}}}; }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Constant; }

 private:
  double c_;
};

class AffineNode final : public Node {
 public:
  AffineNode(Vec a, double b) : a_(std::move(a)), b_(b) {}
  double value(const Vec& x) const override {
    if (x.size() != a_.size()) throw Error(ErrorKind::MalformedInput, "affine field dimension mismatch");
    return a_.dot(x) + b_;
  }
  Vec gradient(const Vec& x) const override {
    if (x.size() != a_.size()) throw Error(ErrorKind::MalformedInput, "affine field dimension mismatch");
    return a_;
  }
  json to_json() const override {
    return {{"family", "affine"},
            {"params", {{"gradient", codec::vec_to_json(a_)}, {"offset", b_}}}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Affine; }

 private:
  Vec a_;
  double b_;
};

class ArctanNode final : public Node {
 public:
  ArctanNode(double amplitude, double scale, double shift, double offset, int axis)
      : amplitude_(amplitude), scale_(scale), shift_(shift), offset_(offset), axis_(axis) {}
  double value(const Vec& x) const override {
    return amplitude_ * std::atan(scale_ * coord(x) + shift_) + offset_;
  }
  Vec gradient(const Vec& x) const override {
    const double s = scale_ * coord(x) + shift_;
    return unit_gradient(x, axis_, amplitude_ * scale_ / (1.0 + s * s));
  }
  json to_json() const override {
    return {{"family", "arctan"},
            {"params",
             {{"amplitude", amplitude_},
              {"scale", scale_},
              {"shift", shift_},
              {"offset", offset_},
              {"axis", axis_}}}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Arctan; }

 private:
  double coord(const Vec& x) const {
    if (axis_ < 0 || axis_ >= x.size()) throw Error(ErrorKind::OutOfDomain, "axis beyond point dimension");
    return x[axis_];
  }
  double amplitude_, scale_, shift_, offset_;
  int axis_;
};

class PhiNode final : public Node {
 public:
  explicit PhiNode(double sign) : sign_(sign) {}
  double value(const Vec& x) const override { return sign_ * finsler::example31_phi(x[0]); }
  Vec gradient(const Vec& x) const override {
    return unit_gradient(x, 0, sign_ * finsler::example31_dphi(x[0]));
  }
  json to_json() const override { return {{"family", "phi"}, {"params", {{"sign", sign_}}}}; }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Phi; }

 private:
  double sign_;
};

class PolynomialClampedNode final : public Node {
 public:
  PolynomialClampedNode(std::vector<double> coefficients, double lo, double hi, int axis)
      : c_(std::move(coefficients)), lo_(lo), hi_(hi), axis_(axis) {
    if (c_.empty()) throw Error(ErrorKind::MalformedInput, "polynomial needs coefficients");
    if (!(lo_ < hi_)) throw Error(ErrorKind::MalformedInput, "clamp interval must be nonempty");
    double scale = 0.0;
    for (double c : c_) scale = std::max(scale, std::abs(c));
    const double tol = 1e-9 * (1.0 + scale) * (1.0 + std::pow(std::max(std::abs(lo_), std::abs(hi_)), c_.size()));
    if (std::abs(derivative(lo_)) > tol || std::abs(derivative(hi_)) > tol) {
      throw Error(ErrorKind::InvalidStructure,
                  "clamped polynomial must have zero derivative at both clamp ends");
    }
  }
  double value(const Vec& x) const override { return poly(std::clamp(coord(x), lo_, hi_)); }
  Vec gradient(const Vec& x) const override {
    const double t = coord(x);
    const double d = t <= lo_ || t >= hi_ ? 0.0 : derivative(t);
    return unit_gradient(x, axis_, d);
  }
  json to_json() const override {
    return {{"family", "polynomial-clamped"},
            {"params", {{"coefficients", c_}, {"lo", lo_}, {"hi", hi_}, {"axis", axis_}}}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::PolynomialClamped; }

 private:
  double coord(const Vec& x) const {
    if (axis_ < 0 || axis_ >= x.size()) throw Error(ErrorKind::OutOfDomain, "axis beyond point dimension");
    return x[axis_];
  }
  double poly(double t) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }
  double derivative(double t) const {
    double acc = 0.0;
    for (std::size_t k = c_.size() - 1; k >= 1; --k) acc = acc * t + k * c_[k];
    return acc;
  }
  std::vector<double> c_;
  double lo_, hi_;
  int axis_;
};

class TabulatedNode final : public Node {
 public:
  TabulatedNode(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() < 2 || ys_.size() != xs_.size()) {
      throw Error(ErrorKind::MalformedInput, "tabulated field needs >= 2 matching (x, y) nodes");
    }
    for (std::size_t k = 0; k + 1 < xs_.size(); ++k) {
      if (!(xs_[k + 1] > xs_[k])) throw Error(ErrorKind::MalformedInput, "xs must increase strictly");
    }
  }
  double at(double t) const {
    if (t <= xs_.front()) return ys_.front();
    if (t >= xs_.back()) return ys_.back();
    const std::size_t k = segment(t);
    const double w = (t - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return (1.0 - w) * ys_[k] + w * ys_[k + 1];
  }
  double slope(double t) const {
    if (t < xs_.front() || t >= xs_.back()) return 0.0;
    const std::size_t k = segment(t);
    return (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
  }
  double value(const Vec& x) const override { return at(x[0]); }
  Vec gradient(const Vec& x) const override { return unit_gradient(x, 0, slope(x[0])); }
  json to_json() const override { return {{"family", "tabulated-1d"}, {"xs", xs_}, {"ys", ys_}}; }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Tabulated1d; }
  bool is_c1() const override { return false; }

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

 private:
  std::size_t segment(double t) const {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
    return std::min(static_cast<std::size_t>(it - xs_.begin()) - 1, xs_.size() - 2);
  }
  std::vector<double> xs_;
  std::vector<double> ys_;
};

double quartic_kernel(double s) {
  const double q = 1.0 - s * s;
  return 0.9375 * q * q;
}

// Exact convolution: the integrand is polynomial between table nodes.
class MollifiedNode final : public Node {
 public:
  MollifiedNode(std::shared_ptr<const TabulatedNode> base, double width)
      : base_(std::move(base)), width_(width) {
    if (!(width_ > 0.0)) throw Error(ErrorKind::MalformedInput, "mollifier width must be positive");
  }
  double value(const Vec& x) const override { return integrate(x[0], false); }
  Vec gradient(const Vec& x) const override { return unit_gradient(x, 0, integrate(x[0], true)); }
  json to_json() const override {
    return {{"family", "mollified-1d"}, {"params", {{"width", width_}}}, {"base", base_->to_json()}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Mollified1d; }

 private:
  double integrate(double u, bool derivative) const {
    const auto& xs = base_->xs();
    std::vector<double> cuts{-1.0, 1.0};
    const auto first = std::upper_bound(xs.begin(), xs.end(), u - width_);
    for (auto it = first; it != xs.end() && *it < u + width_; ++it) cuts.push_back((u - *it) / width_);
    std::sort(cuts.begin(), cuts.end());
    const auto& rule = gauss_legendre(4);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k];
      const double len = cuts[k + 1] - a;
      if (len <= 0.0) continue;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = a + rule.nodes[q] * len;
        const double t = u - width_ * s;
        const double f = derivative ? base_->slope(t) : base_->at(t);
        total += rule.weights[q] * len * f * quartic_kernel(s);
      }
    }
    return total;
  }

  std::shared_ptr<const TabulatedNode> base_;
  double width_;
};

class SmoothTruncatedDistanceNode final : public Node {
 public:
  SmoothTruncatedDistanceNode(finsler::MinkowskiNormField field, Vec center, double delta)
      : field_(std::move(field)), center_(std::move(center)), delta_(delta) {
    if (!field_.is_constant()) {
      throw Error(ErrorKind::InvalidStructure, "smooth truncated distance needs a constant norm field");
    }
    if (!(delta_ > 0.0 && delta_ < 0.5)) throw Error(ErrorKind::MalformedInput, "delta must be in (0, 1/2)");
    if (center_.size() != field_.dimension()) throw Error(ErrorKind::MalformedInput, "center dimension mismatch");
  }
  double value(const Vec& x) const override { return saturate(field_(x, x - center_)); }
  Vec gradient(const Vec& x) const override {
    const Vec w = x - center_;
    if (w.isZero(0.0)) return Vec::Zero(x.size());
    return saturate_slope(field_(x, w)) * field_.gradient_v(x, w);
  }
  json to_json() const override {
    return {{"family", "smooth-truncated-distance"},
            {"params", {{"center", codec::vec_to_json(center_)}, {"delta", delta_}}},
            {"norm", codec::field_to_json(field_)}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::SmoothTruncatedDistance; }

 private:
  double saturate(double t) const {
    const double d = delta_;
    if (t <= 0.0) return 0.0;
    if (t < d) return t * t / (2.0 * d);
    if (t < 1.0 - d) return t - 0.5 * d;
    if (t < 1.0) return 1.0 - d - (1.0 - t) * (1.0 - t) / (2.0 * d);
    return 1.0 - d;
  }
  double saturate_slope(double t) const {
    const double d = delta_;
    if (t <= 0.0) return 0.0;
    if (t < d) return t / d;
    if (t < 1.0 - d) return 1.0;
    if (t < 1.0) return (1.0 - t) / d;
    return 0.0;
  }
  finsler::MinkowskiNormField field_;
  Vec center_;
  double delta_;
};

class SumNode final : public Node {
 public:
  SumNode(std::vector<std::pair<double, NodePtr>> terms, double constant)
      : terms_(std::move(terms)), constant_(constant) {}
  double value(const Vec& x) const override {
    double acc = constant_;
    for (const auto& [w, node] : terms_) acc += w * node->value(x);
    return acc;
  }
  Vec gradient(const Vec& x) const override {
    Vec acc = Vec::Zero(x.size());
    for (const auto& [w, node] : terms_) acc += w * node->gradient(x);
    return acc;
  }
  json to_json() const override {
    json terms = json::array();
    for (const auto& [w, node] : terms_) terms.push_back({{"weight", w}, {"field", node->to_json()}});
    return {{"family", "sum"}, {"terms", terms}, {"constant", constant_}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Sum; }
  bool is_c1() const override {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second->is_c1(); });
  }

 private:
  std::vector<std::pair<double, NodePtr>> terms_;
  double constant_;
};

class ProductNode final : public Node {
 public:
  ProductNode(NodePtr a, NodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  double value(const Vec& x) const override { return a_->value(x) * b_->value(x); }
  Vec gradient(const Vec& x) const override {
    return a_->value(x) * b_->gradient(x) + b_->value(x) * a_->gradient(x);
  }
  json to_json() const override {
    return {{"family", "product"}, {"factors", {a_->to_json(), b_->to_json()}}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Product; }
  bool is_c1() const override { return a_->is_c1() && b_->is_c1(); }

 private:
  NodePtr a_, b_;
};

class ReciprocalNode final : public Node {
 public:
  explicit ReciprocalNode(NodePtr base) : base_(std::move(base)) {}
  double value(const Vec& x) const override { return 1.0 / base_->value(x); }
  Vec gradient(const Vec& x) const override {
    const double v = base_->value(x);
    return -base_->gradient(x) / (v * v);
  }
  json to_json() const override { return {{"family", "reciprocal"}, {"base", base_->to_json()}}; }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Reciprocal; }
  bool is_c1() const override { return base_->is_c1(); }

 private:
  NodePtr base_;
};

class ComposedNode final : public Node {
 public:
  ComposedNode(NodePtr base, isometry::SmoothMap map) : base_(std::move(base)), map_(std::move(map)) {}
  double value(const Vec& x) const override { return base_->value(map_(x)); }
  Vec gradient(const Vec& x) const override {
    return map_.jacobian(x).transpose() * base_->gradient(map_(x));
  }
  json to_json() const override {
    return {{"family", "composed"}, {"base", base_->to_json()}, {"map", codec::map_to_json(map_)}};
  }
  ScalarField::Kind kind() const override { return ScalarField::Kind::Composed; }
  bool is_c1() const override { return base_->is_c1(); }

 private:
  NodePtr base_;
  isometry::SmoothMap map_;
};

}  // namespace

ScalarField ScalarField::constant(double value) {
  return ScalarField(std::make_shared<ConstantNode>(value));
}

ScalarField ScalarField::affine(Vec gradient, double offset) {
  return ScalarField(std::make_shared<AffineNode>(std::move(gradient), offset));
}

ScalarField ScalarField::arctan(double amplitude, double scale, double shift, double offset,
                                int axis) {
  return ScalarField(std::make_shared<ArctanNode>(amplitude, scale, shift, offset, axis));
}

ScalarField ScalarField::phi(double sign) { return ScalarField(std::make_shared<PhiNode>(sign)); }

ScalarField ScalarField::polynomial_clamped(std::vector<double> coefficients, double lo, double hi,
                                            int axis) {
  return ScalarField(std::make_shared<PolynomialClampedNode>(std::move(coefficients), lo, hi, axis));
}

ScalarField ScalarField::tabulated_1d(std::vector<double> xs, std::vector<double> ys) {
  return ScalarField(std::make_shared<TabulatedNode>(std::move(xs), std::move(ys)));
}

ScalarField ScalarField::mollified_1d(const ScalarField& tabulated, double width) {
  auto base = std::dynamic_pointer_cast<const TabulatedNode>(tabulated.node_);
  if (!base) throw Error(ErrorKind::MalformedInput, "mollification expects a tabulated-1d field");
  return ScalarField(std::make_shared<MollifiedNode>(std::move(base), width));
}

ScalarField ScalarField::smooth_truncated_distance(const finsler::MinkowskiNormField& field,
                                                   Vec center, double delta) {
  return ScalarField(std::make_shared<SmoothTruncatedDistanceNode>(field, std::move(center), delta));
}

ScalarField ScalarField::from_json(const json& spec) {
  const std::string family = spec.at("family").get<std::string>();
  const json params = spec.value("params", json::object());
  if (family == "constant") return constant(params.at("value").get<double>());
  if (family == "affine") {
    return affine(codec::vec_from_json(params.at("gradient")), params.value("offset", 0.0));
  }
  if (family == "arctan" || family == "arctan-based") {
    return arctan(params.value("amplitude", 1.0), params.value("scale", 1.0),
                  params.value("shift", 0.0), params.value("offset", 0.0), params.value("axis", 0));
  }
  if (family == "phi") return phi(params.value("sign", 1.0));
  if (family == "neg-phi") return neg_phi();
  if (family == "polynomial-clamped") {
    return polynomial_clamped(params.at("coefficients").get<std::vector<double>>(),
                              params.at("lo").get<double>(), params.at("hi").get<double>(),
                              params.value("axis", 0));
  }
  if (family == "tabulated-1d") {
    return tabulated_1d(spec.at("xs").get<std::vector<double>>(),
                        spec.at("ys").get<std::vector<double>>());
  }
  if (family == "mollified-1d") {
    return mollified_1d(from_json(spec.at("base")), params.at("width").get<double>());
  }
  if (family == "smooth-truncated-distance") {
    return smooth_truncated_distance(codec::field_from_json(spec.at("norm")),
                                     codec::vec_from_json(params.at("center")),
                                     params.at("delta").get<double>());
  }
  if (family == "sum") {
    std::vector<std::pair<double, NodePtr>> terms;
    for (const auto& term : spec.at("terms")) {
      terms.emplace_back(term.value("weight", 1.0), from_json(term.at("field")).node_);
    }
    return ScalarField(std::make_shared<SumNode>(std::move(terms), spec.value("constant", 0.0)));
  }
  if (family == "product") {
    const auto& factors = spec.at("factors");
    if (factors.size() != 2) throw Error(ErrorKind::MalformedInput, "product needs two factors");
    return from_json(factors[0]).times(from_json(factors[1]));
  }
  if (family == "reciprocal") return from_json(spec.at("base")).reciprocal();
  if (family == "composed") {
    return from_json(spec.at("base")).compose(codec::map_from_json(spec.at("map")));
  }
  throw Error(ErrorKind::MalformedInput, "unknown field family " + family);
}

json ScalarField::to_json() const { return node_->to_json(); }

double ScalarField::operator()(const Vec& x) const { return node_->value(x); }

Vec ScalarField::gradient(const Vec& x) const { return node_->gradient(x); }

Vec ScalarField::gradient_fd(const Vec& x) const {
  constexpr double h = 1e-6;
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec plus = x;
    Vec minus = x;
    plus[i] += h;
    minus[i] -= h;
    g[i] = (node_->value(plus) - node_->value(minus)) / (2.0 * h);
  }
  return g;
}

ScalarField::Kind ScalarField::kind() const { return node_->kind(); }

bool ScalarField::is_c1() const { return node_->is_c1(); }

ScalarField ScalarField::operator+(const ScalarField& other) const {
  return ScalarField(std::make_shared<SumNode>(
      std::vector<std::pair<double, NodePtr>>{{1.0, node_}, {1.0, other.node_}}, 0.0));
}

ScalarField ScalarField::operator-(const ScalarField& other) const {
  return ScalarField(std::make_shared<SumNode>(
      std::vector<std::pair<double, NodePtr>>{{1.0, node_}, {-1.0, other.node_}}, 0.0));
}

ScalarField ScalarField::scaled(double factor) const {
  return ScalarField(
      std::make_shared<SumNode>(std::vector<std::pair<double, NodePtr>>{{factor, node_}}, 0.0));
}

ScalarField ScalarField::plus(double constant) const {
  return ScalarField(
      std::make_shared<SumNode>(std::vector<std::pair<double, NodePtr>>{{1.0, node_}}, constant));
}

ScalarField ScalarField::times(const ScalarField& other) const {
  return ScalarField(std::make_shared<ProductNode>(node_, other.node_));
}

ScalarField ScalarField::reciprocal() const {
  return ScalarField(std::make_shared<ReciprocalNode>(node_));
}

ScalarField ScalarField::compose(const isometry::SmoothMap& map) const {
  return ScalarField(std::make_shared<ComposedNode>(node_, map));
}

const std::vector<double>& ScalarField::table_xs() const {
  static const std::vector<double> empty;
  const auto* table = dynamic_cast<const TabulatedNode*>(node_.get());
  return table ? table->xs() : empty;
}

const std::vector<double>& ScalarField::table_ys() const {
  static const std::vector<double> empty;
  const auto* table = dynamic_cast<const TabulatedNode*>(node_.get());
  return table ? table->ys() : empty;
}

std::string to_string(ScalarField::Kind kind) {
  switch (kind) {
    case ScalarField::Kind::Constant: return "constant";
    case ScalarField::Kind::Affine: return "affine";
    case ScalarField::Kind::Arctan: return "arctan";
    case ScalarField::Kind::Phi: return "phi";
    case ScalarField::Kind::PolynomialClamped: return "polynomial-clamped";
    case ScalarField::Kind::Tabulated1d: return "tabulated-1d";
    case ScalarField::Kind::Mollified1d: return "mollified-1d";
    case ScalarField::Kind::SmoothTruncatedDistance: return "smooth-truncated-distance";
    case ScalarField::Kind::Sum: return "sum";
    case ScalarField::Kind::Product: return "product";
    case ScalarField::Kind::Reciprocal: return "reciprocal";
    case ScalarField::Kind::Composed: return "composed";
  }
  return "unknown";
}

DerivativeSelfCheck derivative_self_check(const ScalarField& f, const std::vector<Vec>& xs,
                                          double rel_tol) {
  DerivativeSelfCheck check;
  for (const Vec& x : xs) {
    const Vec analytic = f.gradient(x);
    const Vec numeric = f.gradient_fd(x);
    const double rel =
        (analytic - numeric).lpNorm<Eigen::Infinity>() /
        std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
    if (rel > check.max_rel_error) {
      check.max_rel_error = rel;
      check.worst_x = x;
    }
  }
  check.pass = check.max_rel_error <= rel_tol;
  return check;
}

}  // namespace finslerq::semilip
