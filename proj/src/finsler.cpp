#include "finslerq/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>

#include <boost/math/tools/minima.hpp>

#include "finslerq/errors.hpp"
#include "finslerq/quadrature.hpp"

namespace finslerq::finsler {

double example31_phi(double t) { return t - std::atan(t); }

double example31_dphi(double t) { return t * t / (1.0 + t * t); }

MinkowskiNormField::MinkowskiNormField(Family family, Mat metric, Vec drift, Mat drift_gradient)
    : family_(family),
      metric_(std::move(metric)),
      drift_(std::move(drift)),
      drift_gradient_(std::move(drift_gradient)) {
  const auto n = metric_.rows();
  if (n < 1 || metric_.cols() != n) {
    throw Error(ErrorKind::MalformedInput, "metric must be a non-empty square matrix");
  }
  if (!metric_.isApprox(metric_.transpose(), 1e-12)) {
    throw Error(ErrorKind::InvalidStructure, "metric must be symmetric");
  }
  Eigen::LLT<Mat> llt(metric_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidStructure, "metric must be positive definite");
  }
  metric_inverse_ = llt.solve(Mat::Identity(n, n));
  if (drift_.size() == 0) drift_ = Vec::Zero(n);
  if (drift_.size() != n) throw Error(ErrorKind::MalformedInput, "drift dimension mismatch");
  if (drift_gradient_.size() != 0 && (drift_gradient_.rows() != n || drift_gradient_.cols() != n)) {
    throw Error(ErrorKind::MalformedInput, "drift gradient must be n x n");
  }
}

MinkowskiNormField MinkowskiNormField::euclidean(int dimension) {
  if (dimension < 1) throw Error(ErrorKind::MalformedInput, "dimension must be positive");
  return {Family::Euclidean, Mat::Identity(dimension, dimension), Vec(), Mat()};
}

MinkowskiNormField MinkowskiNormField::riemannian(Mat metric) {
  return {Family::Riemannian, std::move(metric), Vec(), Mat()};
}

MinkowskiNormField MinkowskiNormField::randers(Mat metric, Vec drift, Mat drift_gradient) {
  return {Family::Randers, std::move(metric), std::move(drift), std::move(drift_gradient)};
}

MinkowskiNormField MinkowskiNormField::example31() {
  return {Family::Example31, Mat::Identity(1, 1), Vec(), Mat()};
}

Vec MinkowskiNormField::drift_at(const Vec& x) const {
  switch (family_) {
    case Family::Example31:
      return Vec::Constant(1, -example31_dphi(x[0]));
    case Family::Randers:
      if (drift_gradient_.size() != 0) return drift_ + drift_gradient_ * x;
      return drift_;
    default:
      return Vec::Zero(metric_.rows());
  }
}

double MinkowskiNormField::operator()(const Vec& x, const Vec& v) const {
  const double base = family_ == Family::Euclidean || family_ == Family::Example31
                          ? v.norm()
                          : std::sqrt(std::max(0.0, v.dot(metric_ * v)));
  switch (family_) {
    case Family::Euclidean:
    case Family::Riemannian:
      return base;
    case Family::Example31: {
      // 1 - phi' = 1/(1+t^2) and 1 + phi' = (1+2t^2)/(1+t^2), without cancellation.
      const double t2 = x[0] * x[0];
      return v[0] >= 0.0 ? v[0] / (1.0 + t2) : -v[0] * (1.0 + 2.0 * t2) / (1.0 + t2);
    }
    case Family::Randers:
      return base + drift_at(x).dot(v);
  }
  return base;
}

Vec MinkowskiNormField::gradient_v(const Vec& x, const Vec& v) const {
  const Vec av = metric_ * v;
  const double base = std::sqrt(std::max(0.0, v.dot(av)));
  if (base == 0.0) throw Error(ErrorKind::Precondition, "dF/dv undefined at v = 0");
  return av / base + drift_at(x);
}

double MinkowskiNormField::drift_norm(const Vec& x) const {
  const Vec b = drift_at(x);
  return std::sqrt(std::max(0.0, b.dot(metric_inverse_ * b)));
}

double MinkowskiNormField::minkowski_margin(const Vec& x) const {
  if (family_ == Family::Example31) return 1.0 / (1.0 + x[0] * x[0]);
  return 1.0 - drift_norm(x);
}

bool MinkowskiNormField::is_constant() const noexcept {
  switch (family_) {
    case Family::Euclidean:
    case Family::Riemannian:
      return true;
    case Family::Randers:
      return drift_gradient_.size() == 0 || drift_gradient_.isZero(0.0);
    case Family::Example31:
      return false;
  }
  return false;
}

bool MinkowskiNormField::is_reversible() const noexcept {
  return family_ == Family::Euclidean || family_ == Family::Riemannian ||
         (family_ == Family::Randers && drift_.isZero(0.0) &&
          (drift_gradient_.size() == 0 || drift_gradient_.isZero(0.0)));
}

std::string to_string(MinkowskiNormField::Family family) {
  switch (family) {
    case MinkowskiNormField::Family::Euclidean: return "euclidean";
    case MinkowskiNormField::Family::Riemannian: return "riemannian";
    case MinkowskiNormField::Family::Randers: return "randers";
    case MinkowskiNormField::Family::Example31: return "example31";
  }
  return "unknown";
}

MinkowskiReport validate_minkowski(const MinkowskiNormField& field, const std::vector<Vec>& xs,
                                   const std::vector<Vec>& vs) {
  if (xs.empty() || vs.empty()) {
    throw Error(ErrorKind::DegenerateInput, "Minkowski validation needs x and v samples");
  }
  MinkowskiReport report;
  const int n = field.dimension();
  bool zero_noted = false;
  for (const Vec& x : xs) {
    if (x.size() != n) throw Error(ErrorKind::MalformedInput, "sample point dimension mismatch");
    const bool has_drift = field.family() == MinkowskiNormField::Family::Randers ||
                           field.family() == MinkowskiNormField::Family::Example31;
    if (has_drift) {
      if (!(field.minkowski_margin(x) > 0.0)) {
        report.violations.push_back({"drift", x, Vec::Zero(n), field.drift_norm(x)});
      }
    }
    for (const Vec& v : vs) {
      if (v.size() != n) throw Error(ErrorKind::MalformedInput, "sample vector dimension mismatch");
      const double fv = field(x, v);
      const double scale = 1.0 + std::abs(fv);
      for (double lambda : {0.5, 2.0, 3.0}) {
        const double defect = std::abs(field(x, lambda * v) - lambda * fv);
        if (defect > 1e-12 * lambda * scale) {
          report.violations.push_back({"homogeneity", x, v, defect});
        }
      }
      for (const Vec& u : vs) {
        const double defect = field(x, u + v) - field(x, u) - fv;
        if (defect > 1e-12 * (scale + std::abs(field(x, u)))) {
          report.violations.push_back({"subadditivity", x, u + v, defect});
        }
      }
      const double vnorm = v.norm();
      if (vnorm == 0.0) {
        if (!zero_noted) {
          report.notes.push_back("zero vector skipped for the separation and Hessian checks");
          zero_noted = true;
        }
        continue;
      }
      if (!(fv > 0.0)) {
        report.violations.push_back({"separation", x, v, -fv});
        continue;
      }
      // g_v = 1/2 Hess_v F^2 by central differences.
      const double h = 1e-4 * vnorm;
      const auto half_sq = [&](const Vec& w) {
        const double f = field(x, w);
        return 0.5 * f * f;
      };
      Mat hess(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          Vec pp = v, pm = v, mp = v, mm = v;
          pp[i] += h; pp[j] += h;
          pm[i] += h; pm[j] -= h;
          mp[i] -= h; mp[j] += h;
          mm[i] -= h; mm[j] -= h;
          hess(i, j) = (half_sq(pp) - half_sq(pm) - half_sq(mp) + half_sq(mm)) / (4.0 * h * h);
          hess(j, i) = hess(i, j);
        }
      }
      const double min_eig = Eigen::SelfAdjointEigenSolver<Mat>(hess).eigenvalues().minCoeff();
      if (!(min_eig > 1e-8)) {
        report.violations.push_back({"positive-definite", x, v, min_eig});
      }
    }
  }
  return report;
}

bool Box::contains(const Vec& p, double tolerance) const {
  if (p.size() != lo.size()) return false;
  for (int i = 0; i < p.size(); ++i) {
    const double slack = tolerance * (1.0 + std::max(std::abs(lo[i]), std::abs(hi[i])));
    if (!(p[i] >= lo[i] - slack && p[i] <= hi[i] + slack)) return false;
  }
  return true;
}

FinslerChart::FinslerChart(Box box, MinkowskiNormField field, std::vector<int> grid, int stencil)
    : box_(std::move(box)), field_(std::move(field)), grid_(std::move(grid)), stencil_(stencil) {
  const int n = box_.dimension();
  if (n < 1 || n > 3) throw Error(ErrorKind::MalformedInput, "charts support dimensions 1 to 3");
  if (box_.hi.size() != n) throw Error(ErrorKind::MalformedInput, "box bounds dimension mismatch");
  if (field_.dimension() != n) {
    throw Error(ErrorKind::MalformedInput, "norm field dimension does not match the box");
  }
  for (int i = 0; i < n; ++i) {
    if (!(box_.lo[i] < box_.hi[i])) throw Error(ErrorKind::MalformedInput, "box must be nonempty");
  }
  if (static_cast<int>(grid_.size()) != n) {
    throw Error(ErrorKind::MalformedInput, "grid needs one node count per axis");
  }
  for (int count : grid_) {
    if (count < 2) throw Error(ErrorKind::MalformedInput, "grid needs at least 2 nodes per axis");
  }
  if (stencil_ == 0) stencil_ = n == 1 ? 1 : 2;
  if (stencil_ < 1) throw Error(ErrorKind::MalformedInput, "stencil radius must be >= 1");
}

double FinslerChart::step(int axis) const {
  return (box_.hi[axis] - box_.lo[axis]) / (grid_[axis] - 1);
}

std::size_t FinslerChart::node_count() const {
  std::size_t total = 1;
  for (int count : grid_) total *= static_cast<std::size_t>(count);
  return total;
}

Vec FinslerChart::node(std::size_t linear_index) const {
  Vec p(dimension());
  for (int i = 0; i < dimension(); ++i) {
    const auto m = static_cast<int>(linear_index % grid_[i]);
    linear_index /= grid_[i];
    // Last node pinned to hi so nested grids share endpoints exactly.
    p[i] = m == grid_[i] - 1 ? box_.hi[i] : box_.lo[i] + m * step(i);
  }
  return p;
}

void FinslerChart::require_inside(const Vec& p, const char* what) const {
  if (!box_.contains(p)) {
    throw Error(ErrorKind::OutOfDomain, std::string(what) + " lies outside the chart box");
  }
}

double segment_length(const MinkowskiNormField& field, const Vec& a, const Vec& b, int order) {
  const Vec delta = b - a;
  if (field.is_constant()) return field(a, delta);
  const auto& rule = gauss_legendre(order);
  double total = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    total += rule.weights[q] * field(a + rule.nodes[q] * delta, delta);
  }
  return total;
}

namespace {

// One Gauss-Legendre panel per grid cell crossed, so long segments keep the
// accuracy of short ones.
double composite_length(const FinslerChart& chart, const Vec& a, const Vec& b, int order) {
  if (chart.field().is_constant()) return chart.field()(a, b - a);
  double cells = 0.0;
  for (int i = 0; i < chart.dimension(); ++i) cells = std::max(cells, std::abs(b[i] - a[i]) / chart.step(i));
  const int panels = std::max(1, static_cast<int>(std::ceil(cells - 1e-9)));
  double total = 0.0;
  Vec from = a;
  for (int p = 1; p <= panels; ++p) {
    const Vec to = p == panels ? b : Vec(a + (b - a) * (static_cast<double>(p) / panels));
    total += segment_length(chart.field(), from, to, order);
    from = to;
  }
  return total;
}

}  // namespace

double path_length(const FinslerChart& chart, const PiecewisePath& path, int order) {
  if (path.nodes.size() < 2) throw Error(ErrorKind::MalformedInput, "path needs >= 2 nodes");
  for (const Vec& p : path.nodes) chart.require_inside(p, "path node");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
    total += composite_length(chart, path.nodes[k], path.nodes[k + 1], order);
  }
  return total;
}

namespace {

std::vector<std::vector<int>> stencil_offsets(int dimension, int radius) {
  std::vector<std::vector<int>> offsets;
  std::vector<int> k(dimension, -radius);
  while (true) {
    int g = 0;
    for (int c : k) g = std::gcd(g, std::abs(c));
    if (g == 1) offsets.push_back(k);
    int axis = 0;
    while (axis < dimension && ++k[axis] > radius) k[axis++] = -radius;
    if (axis == dimension) break;
  }
  return offsets;
}

// Grid nodes plus extra query nodes, explored lazily by Dijkstra.
class StencilGraph {
 public:
  StencilGraph(const FinslerChart& chart, std::vector<Vec> extras, int order)
      : chart_(chart), extras_(std::move(extras)), order_(order) {
    const int n = chart.dimension();
    offsets_ = stencil_offsets(n, chart.stencil());
    strides_.resize(n);
    std::size_t stride = 1;
    for (int i = 0; i < n; ++i) {
      strides_[i] = stride;
      stride *= chart.grid()[i];
    }
    grid_count_ = stride;
    attached_.resize(extras_.size());
    const int r = chart.stencil();
    for (std::size_t e = 0; e < extras_.size(); ++e) {
      std::vector<int> lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        const double frac = (extras_[e][i] - chart.box().lo[i]) / chart.step(i);
        const int base = std::clamp(static_cast<int>(std::floor(frac)), 0, chart.grid()[i] - 2);
        lo[i] = std::max(0, base - r + 1);
        hi[i] = std::min(chart.grid()[i] - 1, base + r);
      }
      std::vector<int> m = lo;
      while (true) {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i) idx += m[i] * strides_[i];
        attached_[e].push_back(idx);
        grid_to_extras_[idx].push_back(grid_count_ + e);
        int axis = 0;
        while (axis < n && ++m[axis] > hi[axis]) m[axis] = lo[axis], ++axis;
        if (axis == n) break;
      }
    }
  }

  std::size_t grid_count() const { return grid_count_; }
  std::size_t size() const { return grid_count_ + extras_.size(); }

  Vec point(std::size_t node) const {
    return node < grid_count_ ? chart_.node(node) : extras_[node - grid_count_];
  }

  struct Result {
    std::vector<double> dist;
    std::vector<std::size_t> pred;
    std::size_t settled = 0;
  };

  Result run(std::size_t source, std::optional<std::size_t> target) const {
    constexpr auto kNone = static_cast<std::size_t>(-1);
    Result out;
    out.dist.assign(size(), kInf);
    out.pred.assign(size(), kNone);
    std::vector<char> done(size(), 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    out.dist[source] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
      const auto [du, u] = queue.top();
      queue.pop();
      if (done[u]) continue;
      done[u] = 1;
      ++out.settled;
      if (target && u == *target) break;
      const Vec pu = point(u);
      for_each_neighbor(u, [&](std::size_t v) {
        if (done[v]) return;
        const Vec pv = point(v);
        const double w = composite_length(chart_, pu, pv, order_);
        if (w < 0.0) {
          throw Error(ErrorKind::InvalidStructure,
                      "norm field is negative along a grid edge; drift violates positivity");
        }
        if (du + w < out.dist[v]) {
          out.dist[v] = du + w;
          out.pred[v] = u;
          queue.push({out.dist[v], v});
        }
      });
    }
    return out;
  }

 private:
  template <typename Fn>
  void for_each_neighbor(std::size_t u, Fn&& fn) const {
    const int n = chart_.dimension();
    if (u < grid_count_) {
      std::vector<int> m(n);
      std::size_t rest = u;
      for (int i = 0; i < n; ++i) {
        m[i] = static_cast<int>(rest % chart_.grid()[i]);
        rest /= chart_.grid()[i];
      }
      for (const auto& off : offsets_) {
        std::size_t idx = 0;
        bool inside = true;
        for (int i = 0; i < n && inside; ++i) {
          const int c = m[i] + off[i];
          inside = c >= 0 && c < chart_.grid()[i];
          idx += static_cast<std::size_t>(c) * strides_[i];
        }
        if (inside) fn(idx);
      }
      if (const auto it = grid_to_extras_.find(u); it != grid_to_extras_.end()) {
        for (std::size_t e : it->second) fn(e);
      }
      return;
    }
    const std::size_t e = u - grid_count_;
    for (std::size_t g : attached_[e]) fn(g);
    for (std::size_t other = 0; other < extras_.size(); ++other) {
      if (other == e) continue;
      bool close = true;
      for (int i = 0; i < n; ++i) {
        close = close && std::abs(extras_[other][i] - extras_[e][i]) <=
                             chart_.stencil() * chart_.step(i) * (1.0 + 1e-12);
      }
      if (close) fn(grid_count_ + other);
    }
  }

  const FinslerChart& chart_;
  std::vector<Vec> extras_;
  int order_;
  std::vector<std::vector<int>> offsets_;
  std::vector<std::size_t> strides_;
  std::size_t grid_count_ = 0;
  std::vector<std::vector<std::size_t>> attached_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> grid_to_extras_;
};

}  // namespace

GraphDistance finsler_distance_graph(const FinslerChart& chart, const Vec& x, const Vec& y,
                                     int order) {
  chart.require_inside(x, "source point");
  chart.require_inside(y, "target point");
  GraphDistance result;
  if (x == y) {
    result.path.nodes = {x, y};
    return result;
  }
  const StencilGraph graph(chart, {x, y}, order);
  const std::size_t source = graph.grid_count();
  const std::size_t target = source + 1;
  const auto run = graph.run(source, target);
  if (!std::isfinite(run.dist[target])) {
    throw Error(ErrorKind::Internal, "grid graph is disconnected");
  }
  result.value = run.dist[target];
  result.settled = run.settled;
  std::vector<Vec> reversed;
  for (std::size_t v = target; v != source; v = run.pred[v]) reversed.push_back(graph.point(v));
  reversed.push_back(x);
  result.path.nodes.assign(reversed.rbegin(), reversed.rend());
  return result;
}

std::vector<double> grid_distances_from(const FinslerChart& chart, const Vec& x, int order) {
  chart.require_inside(x, "source point");
  const StencilGraph graph(chart, {x}, order);
  auto run = graph.run(graph.grid_count(), std::nullopt);
  run.dist.resize(graph.grid_count());
  return run.dist;
}

RefineResult finsler_distance_refine(const FinslerChart& chart, const PiecewisePath& initial,
                                     int max_sweeps, int order) {
  RefineResult result;
  result.initial = path_length(chart, initial, order);
  result.value = result.initial;
  result.path = initial;
  if (result.initial == 0.0 || initial.nodes.size() < 3) {
    result.converged = true;
    return result;
  }
  auto& nodes = result.path.nodes;
  const int n = chart.dimension();
  const int bits = std::numeric_limits<double>::digits / 2;
  double total = result.initial;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    result.sweeps = sweep;
    for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
      for (int i = 0; i < n; ++i) {
        const double c = nodes[k][i];
        const double reach =
            std::max(std::abs(nodes[k - 1][i] - c), std::abs(nodes[k + 1][i] - c));
        if (reach == 0.0) continue;
        const double lo = std::max(chart.box().lo[i], c - reach);
        const double hi = std::min(chart.box().hi[i], c + reach);
        Vec trial = nodes[k];
        const auto local = [&](double t) {
          trial[i] = t;
          return composite_length(chart, nodes[k - 1], trial, order) +
                 composite_length(chart, trial, nodes[k + 1], order);
        };
        const double current = local(c);
        const auto [best_t, best_value] = boost::math::tools::brent_find_minima(local, lo, hi, bits);
        if (best_value < current) nodes[k][i] = best_t;
      }
    }
    const double updated = path_length(chart, result.path, order);
    const double improvement = (total - updated) / total;
    total = std::min(total, updated);
    if (improvement < 1e-10) {
      result.converged = true;
      break;
    }
  }
  result.value = total;
  if (result.value > result.initial) {
    result.value = result.initial;
    result.path = initial;
  }
  return result;
}

DriftSpec DriftSpec::example31() {
  return {Kind::Example31, [](double t) { return example31_dphi(t); }};
}

DriftSpec DriftSpec::custom(std::function<double(double)> dphi) {
  return {Kind::Custom, std::move(dphi)};
}

double randers_1d_distance(const DriftSpec& drift, double x, double y) {
  if (!drift.dphi) throw Error(ErrorKind::MalformedInput, "drift derivative missing");
  if (drift.kind == DriftSpec::Kind::Example31) {
    // phi(t) = t - arctan t in closed form; phi' < 1 everywhere.
    if (y >= x) return std::atan(y) - std::atan(x);
    return 2.0 * (x - y) - (std::atan(x) - std::atan(y));
  }
  const double a = std::min(x, y);
  const double b = std::max(x, y);
  constexpr int kChecks = 257;
  for (int k = 0; k < kChecks; ++k) {
    const double t = a + (b - a) * k / (kChecks - 1);
    if (!(std::abs(drift.dphi(t)) < 1.0)) {
      throw Error(ErrorKind::InvalidStructure, "|phi'| >= 1 on the integration range");
    }
  }
  if (y >= x) {
    return integrate_adaptive([&](double t) { return 1.0 - drift.dphi(t); }, x, y);
  }
  return integrate_adaptive([&](double t) { return 1.0 + drift.dphi(t); }, y, x);
}

std::string to_string(DistanceMethod method) {
  switch (method) {
    case DistanceMethod::Graph: return "graph";
    case DistanceMethod::GraphRefined: return "graph+refine";
    case DistanceMethod::Oracle: return "oracle";
    case DistanceMethod::Auto: return "auto";
  }
  return "unknown";
}

DistanceMethod distance_method_from_string(const std::string& name) {
  if (name == "graph") return DistanceMethod::Graph;
  if (name == "graph+refine" || name == "refine") return DistanceMethod::GraphRefined;
  if (name == "oracle") return DistanceMethod::Oracle;
  if (name == "auto") return DistanceMethod::Auto;
  throw Error(ErrorKind::Usage, "unknown distance method " + name);
}

std::optional<double> oracle_distance(const FinslerChart& chart, const Vec& x, const Vec& y) {
  chart.require_inside(x, "source point");
  chart.require_inside(y, "target point");
  const auto& field = chart.field();
  if (field.is_constant()) return field(x, y - x);
  if (field.family() == MinkowskiNormField::Family::Example31) {
    return randers_1d_distance(DriftSpec::example31(), x[0], y[0]);
  }
  if (field.dimension() == 1) {
    const double scale = std::sqrt(field.metric()(0, 0));
    const auto drift = DriftSpec::custom([&field, scale](double t) {
      return -field.drift_at(Vec::Constant(1, t))[0] / scale;
    });
    return scale * randers_1d_distance(drift, x[0], y[0]);
  }
  return std::nullopt;
}

namespace {

double metrication_bound(const FinslerChart& chart) {
  if (chart.dimension() == 1) return 0.0;
  const double gap = std::atan(1.0 / chart.stencil());
  return 1.0 / std::cos(0.5 * gap) - 1.0;
}

}  // namespace

DistanceRecord finsler_distance(const FinslerChart& chart, const Vec& x, const Vec& y,
                                DistanceMethod method) {
  DistanceRecord record{x, y, 0.0, to_string(method), 0.0};
  if (method == DistanceMethod::Auto || method == DistanceMethod::Oracle) {
    if (const auto exact = oracle_distance(chart, x, y)) {
      record.value = *exact;
      record.method = "oracle";
      return record;
    }
    if (method == DistanceMethod::Oracle) {
      throw Error(ErrorKind::InvalidStructure, "no closed-form distance for this chart");
    }
    method = DistanceMethod::GraphRefined;
  }
  const auto graph = finsler_distance_graph(chart, x, y);
  if (method == DistanceMethod::Graph) {
    record.value = graph.value;
    record.method = "graph";
    record.error_estimate = graph.value * metrication_bound(chart);
    return record;
  }
  const auto refined = finsler_distance_refine(chart, graph.path);
  record.value = refined.value;
  record.method = "graph+refine";
  record.error_estimate = refined.initial - refined.value;
  return record;
}

std::optional<double> certified_index_lower(const MinkowskiNormField& field) {
  if (!field.is_constant()) return std::nullopt;
  const double s = field.drift_norm(Vec::Zero(field.dimension()));
  if (!(s < 1.0)) return std::nullopt;
  return (1.0 - s) / (1.0 + s);
}

quasimetric::SymmetryReport chart_index_of_symmetry(const FinslerChart& chart,
                                                    const std::vector<PointPair>& pairs,
                                                    DistanceMethod method) {
  if (pairs.empty()) throw Error(ErrorKind::DegenerateInput, "index estimate needs sample pairs");
  quasimetric::SymmetryReport report;
  report.is_exact = false;
  report.index = 1.0;
  bool have_witness = false;
  for (const auto& [p, q] : pairs) {
    const double forward = finsler_distance(chart, p, q, method).value;
    const double backward = finsler_distance(chart, q, p, method).value;
    double ratio = 1.0;
    const Vec* from = &p;
    const Vec* to = &q;
    if (forward > 0.0 && backward <= forward) {
      ratio = backward / forward;
    } else if (backward > 0.0) {
      ratio = forward / backward;
      std::swap(from, to);
    }
    report.ratios.push_back(ratio);
    if (!have_witness || ratio < report.index) {
      report.index = ratio;
      report.witness_from_point = *from;
      report.witness_to_point = *to;
      have_witness = true;
    }
  }
  report.evidence = quasimetric::is_decaying(report.ratios)
                        ? quasimetric::SymmetryEvidence::DecayingToZero
                        : quasimetric::SymmetryEvidence::UpperEstimate;
  report.certified_lower = certified_index_lower(chart.field());
  return report;
}

}  // namespace finslerq::finsler
