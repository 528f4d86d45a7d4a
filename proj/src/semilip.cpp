#include "finslerq/semilip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "finslerq/errors.hpp"

namespace finslerq::semilip {

namespace {

constexpr int kSeedDirections = 256;
constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;

void require_minkowski(const MinkowskiNormField& field, const Vec& x) {
  if (!(field.minkowski_margin(x) > 0.0)) {
    throw Error(ErrorKind::InvalidStructure, "F(x, .) is not a Minkowski norm at the queried point");
  }
}

// Maximizes h over [lo, hi]; returns (argmax, value).
template <class H>
std::pair<double, double> brent_max(H h, double lo, double hi) {
  boost::uintmax_t iterations = 200;
  const auto [arg, neg] =
      boost::math::tools::brent_find_minima([&h](double t) { return -h(t); }, lo, hi, kBrentBits, iterations);
  return {arg, -neg};
}

double dual_2d(const MinkowskiNormField& field, const Vec& x, const Vec& g) {
  const auto h = [&](double theta) {
    const Vec u = (Vec(2) << std::cos(theta), std::sin(theta)).finished();
    return g.dot(u) / field(x, u);
  };
  const double step = 2.0 * std::numbers::pi / kSeedDirections;
  double best = -kInf;
  double best_theta = 0.0;
  for (int k = 0; k < kSeedDirections; ++k) {
    const double value = h(k * step);
    if (value > best) {
      best = value;
      best_theta = k * step;
    }
  }
  const auto polished = brent_max(h, best_theta - step, best_theta + step);
  return std::max(best, polished.second);
}

Vec sphere_point(double polar, double azimuth) {
  return (Vec(3) << std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
          std::cos(polar))
      .finished();
}

double dual_3d(const MinkowskiNormField& field, const Vec& x, const Vec& g) {
  const auto h = [&](const Vec& u) { return g.dot(u) / field(x, u); };
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double best = -kInf;
  Vec u;
  for (int k = 0; k < kSeedDirections; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / kSeedDirections;
    const Vec candidate = sphere_point(std::acos(z), std::fmod(golden * k, 2.0 * std::numbers::pi));
    const double value = h(candidate);
    if (value > best) {
      best = value;
      u = candidate;
    }
  }
  // Line searches in the tangent plane at the current best direction, along
  // both axes and both diagonals so skewed ridges do not stall the ascent.
  double window = std::sqrt(4.0 * std::numbers::pi / kSeedDirections);
  for (int sweep = 0; sweep < 200 && window > 1e-10; ++sweep) {
    Eigen::Index k;
    u.cwiseAbs().minCoeff(&k);
    const Eigen::Vector3d w = u;
    const Vec e1 = w.cross(Eigen::Vector3d::Unit(k)).normalized();
    const Vec e2 = w.cross(Eigen::Vector3d(e1));
    double gain = 0.0;
    for (const Vec& d : {e1, e2, Vec((e1 + e2) / std::sqrt(2.0)), Vec((e1 - e2) / std::sqrt(2.0))}) {
      const Vec base = u;
      const auto along = brent_max([&](double t) { return h((base + t * d).normalized()); }, -window, window);
      if (along.second > best) {
        gain += along.second - best;
        best = along.second;
        u = (base + along.first * d).normalized();
      }
    }
    if (gain <= 1e-15 * std::abs(best)) window *= 0.25;
  }
  return best;
}

}  // namespace

double dual_asym_norm(const MinkowskiNormField& field, const Vec& x, const Vec& g) {
  if (g.size() != field.dimension()) throw Error(ErrorKind::MalformedInput, "covector dimension mismatch");
  require_minkowski(field, x);
  switch (field.dimension()) {
    case 1: {
      const double forward = field(x, Vec::Constant(1, 1.0));
      const double backward = field(x, Vec::Constant(1, -1.0));
      return std::max(g[0] / forward, -g[0] / backward);
    }
    case 2: return dual_2d(field, x, g);
    case 3: return dual_3d(field, x, g);
    default: throw Error(ErrorKind::MalformedInput, "dual norms support dimensions 1 to 3");
  }
}

double randers_dual_norm(const MinkowskiNormField& field, const Vec& x, const Vec& g) {
  require_minkowski(field, x);
  const Mat inverse = field.metric().inverse();
  const Vec b = field.drift_at(x);
  const double bb = b.dot(inverse * b);
  const double gg = g.dot(inverse * g);
  const double gb = g.dot(inverse * b);
  return (std::sqrt((1.0 - bb) * gg + gb * gb) - gb) / (1.0 - bb);
}

double derivative_asym_norm(const FinslerChart& chart, const ScalarField& f, const Vec& x) {
  chart.require_inside(x, "derivative sample");
  return dual_asym_norm(chart.field(), x, f.gradient(x));
}

bool is_diverging(const std::vector<double>& values, double cap) {
  std::size_t run = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::isinf(values[k])) return true;
    run = k > 0 && values[k] >= values[k - 1] ? run + 1 : 1;
    if (run >= 3 && values[k] > cap) return true;
  }
  return false;
}

DerivativeNormProfile sup_derivative_norm(const FinslerChart& chart, const ScalarField& f,
                                          const std::vector<Vec>& xs, double cap) {
  if (xs.empty()) throw Error(ErrorKind::DegenerateInput, "derivative profile needs samples");
  DerivativeNormProfile profile;
  profile.xs = xs;
  profile.supremum = -kInf;
  for (const Vec& x : xs) {
    const double value = derivative_asym_norm(chart, f, x);
    profile.values.push_back(value);
    if (value > profile.supremum) {
      profile.supremum = value;
      profile.argmax = x;
    }
  }
  profile.diverges = is_diverging(profile.values, cap);
  if (profile.diverges) profile.supremum = kInf;
  return profile;
}

namespace {

void update_slip(SlipEstimate& best, double rise, double distance, const Vec& p, const Vec& q,
                 bool& have) {
  double ratio = 0.0;
  if (distance > 0.0) {
    ratio = std::max(rise, 0.0) / distance;
  } else if (rise > 0.0) {
    ratio = kInf;
  }
  if (!have || ratio > best.value) {
    best.value = ratio;
    best.from = p;
    best.to = q;
    have = true;
  }
}

}  // namespace

SlipEstimate empirical_slip(const FinslerChart& chart, const ScalarField& f,
                            const std::vector<PointPair>& pairs, DistanceMethod method) {
  SlipEstimate best;
  bool have = false;
  for (const auto& [p, q] : pairs) {
    const double distance = finsler::finsler_distance(chart, p, q, method).value;
    update_slip(best, f(q) - f(p), distance, p, q, have);
  }
  return best;
}

SlipEqualityReport verify_slip_equals_derivative_sup(const FinslerChart& chart,
                                                     const ScalarField& f,
                                                     const std::vector<Vec>& xs,
                                                     const std::vector<PointPair>& pairs, double tol,
                                                     DistanceMethod method) {
  if (pairs.empty()) throw Error(ErrorKind::DegenerateInput, "slip check needs sample pairs");
  SlipEqualityReport report;
  report.tol = tol;
  report.s1_witness = empirical_slip(chart, f, pairs, method);
  report.s1 = report.s1_witness.value;
  const auto profile = sup_derivative_norm(chart, f, xs);
  report.s2 = profile.supremum;
  report.s2_diverges = profile.diverges;
  report.s2_argmax = profile.argmax;
  for (std::size_t k = 1; k < profile.values.size(); ++k) {
    report.coverage_slack =
        std::max(report.coverage_slack, std::abs(profile.values[k] - profile.values[k - 1]));
  }
  if (std::isinf(report.s1) || std::isinf(report.s2)) {
    report.pass = std::isinf(report.s1) && std::isinf(report.s2);
  } else {
    report.pass = report.s1 <= report.s2 * (1.0 + tol) &&
                  report.s2 <= report.s1 * (1.0 + tol) + report.coverage_slack;
  }
  return report;
}

SlipEstimate slip_on_line(const FinslerChart& chart, const std::vector<double>& grid,
                          const std::vector<double>& values) {
  if (chart.dimension() != 1) throw Error(ErrorKind::MalformedInput, "line slip needs a 1-D chart");
  if (grid.size() != values.size() || grid.size() < 2) {
    throw Error(ErrorKind::MalformedInput, "line slip needs >= 2 matching samples");
  }
  SlipEstimate best;
  bool have = false;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const Vec a = Vec::Constant(1, grid[k]);
    const Vec b = Vec::Constant(1, grid[k + 1]);
    const double forward = finsler::finsler_distance(chart, a, b).value;
    const double backward = finsler::finsler_distance(chart, b, a).value;
    update_slip(best, values[k + 1] - values[k], forward, a, b, have);
    update_slip(best, values[k] - values[k + 1], backward, b, a, have);
  }
  return best;
}

namespace {

struct LineDistances {
  std::vector<double> forward;
  std::vector<double> backward;
};

LineDistances line_distances(const FinslerChart& chart, const std::vector<double>& grid) {
  LineDistances out;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const Vec a = Vec::Constant(1, grid[k]);
    const Vec b = Vec::Constant(1, grid[k + 1]);
    out.forward.push_back(finsler::finsler_distance(chart, a, b).value);
    out.backward.push_back(finsler::finsler_distance(chart, b, a).value);
  }
  return out;
}

double line_slip(const LineDistances& d, const std::vector<double>& values) {
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double up = values[k + 1] - values[k];
    const double dist = up > 0.0 ? d.forward[k] : d.backward[k];
    if (up == 0.0) continue;
    if (dist <= 0.0) return kInf;
    best = std::max(best, std::abs(up) / dist);
  }
  return best;
}

double derivative_sup(const FinslerChart& chart, const ScalarField& g, const std::vector<double>& grid) {
  double best = 0.0;
  for (double x : grid) best = std::max(best, derivative_asym_norm(chart, g, Vec::Constant(1, x)));
  return best;
}

std::vector<double> verification_grid(const FinslerChart& chart, const std::vector<double>& table) {
  const double lo = chart.box().lo[0];
  const double hi = chart.box().hi[0];
  std::vector<double> grid;
  for (std::size_t k = 0; k + 1 < table.size(); ++k) {
    for (int m = 0; m < 4; ++m) {
      const double x = table[k] + 0.25 * m * (table[k + 1] - table[k]);
      if (x >= lo && x <= hi) grid.push_back(x);
    }
  }
  if (table.back() >= lo && table.back() <= hi) grid.push_back(table.back());
  if (grid.size() < 2) throw Error(ErrorKind::OutOfDomain, "table does not overlap the chart");
  return grid;
}

std::vector<double> chart_grid(const FinslerChart& chart) {
  std::vector<double> grid;
  for (std::size_t k = 0; k < chart.node_count(); ++k) grid.push_back(chart.node(k)[0]);
  return grid;
}

std::vector<double> evaluate(const ScalarField& f, const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(f(Vec::Constant(1, x)));
  return out;
}

}  // namespace

SmoothingResult smooth_approximate_1d(const FinslerChart& chart, const ScalarField& f,
                                      const std::function<double(double)>& eps, double r) {
  if (chart.dimension() != 1) throw Error(ErrorKind::MalformedInput, "smoothing needs a 1-D chart");
  if (!(r > 0.0)) throw Error(ErrorKind::MalformedInput, "slip slack r must be positive");

  ScalarField table = f;
  if (f.is_c1()) {
    SmoothingResult accepted{f};
    accepted.grid = f.table_xs().empty() ? chart_grid(chart) : verification_grid(chart, f.table_xs());
    const auto distances = line_distances(chart, accepted.grid);
    const auto values = evaluate(f, accepted.grid);
    accepted.slip_f = line_slip(distances, values);
    accepted.slip_g = std::max(accepted.slip_f, derivative_sup(chart, f, accepted.grid));
    accepted.unchanged = true;
    if (accepted.slip_g <= accepted.slip_f + r) return accepted;
    table = ScalarField::tabulated_1d(accepted.grid, values);
  } else if (f.kind() != ScalarField::Kind::Tabulated1d) {
    throw Error(ErrorKind::MalformedInput, "smoothing expects a C^1 or tabulated-1d field");
  }

  const auto& xs = table.table_xs();
  const auto& ys = table.table_ys();
  SmoothingResult result{table};
  result.grid = verification_grid(chart, xs);
  const auto distances = line_distances(chart, result.grid);
  const auto f_values = evaluate(table, result.grid);
  result.slip_f = line_slip(distances, f_values);
  if (std::isinf(result.slip_f)) {
    throw Error(ErrorKind::Precondition, "input has an infinite semi-Lipschitz constant");
  }

  double steepest = 0.0;
  double min_eps = kInf;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    steepest = std::max(steepest, std::abs((ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])));
  }
  for (double x : result.grid) {
    const double e = eps(x);
    if (!(e > 0.0)) throw Error(ErrorKind::MalformedInput, "epsilon must be positive");
    min_eps = std::min(min_eps, e);
  }
  // |g - f| <= width * (Euclidean Lipschitz constant of f).
  double width = steepest > 0.0 ? min_eps / steepest : (xs.back() - xs.front());
  const double min_width = 1e-9 * (xs.back() - xs.front());

  std::string last_failure;
  for (int attempt = 1; attempt <= 60 && width >= min_width; ++attempt, width *= 0.5) {
    const ScalarField g = ScalarField::mollified_1d(table, width);
    const auto g_values = evaluate(g, result.grid);
    double deviation = 0.0;
    double worst = result.grid.front();
    bool close = true;
    for (std::size_t k = 0; k < g_values.size(); ++k) {
      const double gap = std::abs(g_values[k] - f_values[k]);
      if (gap > deviation) {
        deviation = gap;
        worst = result.grid[k];
      }
      if (gap > eps(result.grid[k])) close = false;
    }
    result.attempts = attempt;
    if (!close) {
      last_failure = "deviation " + std::to_string(deviation) + " at x = " + std::to_string(worst);
      continue;
    }
    const double slip_g = std::max(line_slip(distances, g_values), derivative_sup(chart, g, result.grid));
    if (slip_g > result.slip_f + r) {
      last_failure = "slip " + std::to_string(slip_g) + " exceeds " + std::to_string(result.slip_f + r);
      continue;
    }
    result.g = g;
    result.width = width;
    result.max_deviation = deviation;
    result.worst_x = worst;
    result.slip_g = slip_g;
    return result;
  }
  throw Error(ErrorKind::ApproximationFailed,
              "no mollifier width satisfied both clauses; last attempt: " + last_failure);
}

Example34Report example34_ratio_experiment(
    const std::vector<std::pair<std::string, ScalarField>>& fields, const std::vector<double>& xs) {
  if (xs.empty()) throw Error(ErrorKind::DegenerateInput, "experiment needs samples");
  const auto field = MinkowskiNormField::example31();
  Example34Report report;
  for (const auto& [name, f] : fields) {
    Example34Entry entry;
    entry.name = name;
    std::vector<double> finsler_values;
    for (double x : xs) {
      const Vec p = Vec::Constant(1, x);
      const double slope = std::abs(f.gradient(p)[0]);
      // The F-unit ball is [-1/F(x,-1), 1/F(x,1)].
      const double reach = std::max(1.0 / field(p, Vec::Constant(1, 1.0)),
                                    1.0 / field(p, Vec::Constant(1, -1.0)));
      entry.classical = std::max(entry.classical, slope);
      finsler_values.push_back(slope * reach);
    }
    entry.finsler = *std::max_element(finsler_values.begin(), finsler_values.end());
    entry.finsler_diverges = is_diverging(finsler_values);
    if (entry.finsler_diverges) entry.finsler = kInf;
    if (entry.classical > 0.0) {
      entry.ratio = entry.finsler / entry.classical;
    } else {
      entry.ratio = entry.finsler > 0.0 ? kInf : 0.0;
    }
    entry.lower_holds = entry.classical <= 2.0 * entry.finsler;
    entry.stated_upper_holds = entry.finsler <= 2.0 * entry.classical;
    report.lower_holds_all = report.lower_holds_all && entry.lower_holds;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace finslerq::semilip
