#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "finslerq/errors.hpp"
#include "finslerq/semilip.hpp"
#include "support/oracles.hpp"

using namespace finslerq;
using namespace finslerq::semilip;
using finsler::FinslerChart;
using finsler::MinkowskiNormField;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v1(double x) { return Vec::Constant(1, x); }

FinslerChart ex31(double lo, double hi, int nodes) {
  return FinslerChart({v1(lo), v1(hi)}, MinkowskiNormField::example31(), {nodes});
}

std::vector<Vec> line_points(double lo, double hi, int n) {
  std::vector<Vec> xs;
  for (int k = 0; k <= n; ++k) xs.push_back(v1(lo + (hi - lo) * k / n));
  return xs;
}

std::vector<finsler::PointPair> adjacent_pairs(const std::vector<Vec>& xs) {
  std::vector<finsler::PointPair> pairs;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    pairs.emplace_back(xs[i - 1], xs[i]);
    pairs.emplace_back(xs[i], xs[i - 1]);
  }
  return pairs;
}

}  // namespace

TEST(ScalarField, ValuesAndJson) {
  const auto f = ScalarField::from_json(nlohmann::json::parse(
      R"({"family":"sum","terms":[{"weight":2,"field":{"family":"arctan"}},{"weight":1,"field":{"family":"neg-phi"}}],"constant":0.5})"));
  EXPECT_NEAR(f(v1(1.0)), 2 * kPi / 4 - oracle::phi(1.0) + 0.5, 1e-15);
  const auto back = ScalarField::from_json(f.to_json());
  EXPECT_DOUBLE_EQ(back(v1(0.3)), f(v1(0.3)));
  EXPECT_THROW(ScalarField::from_json(nlohmann::json{{"family", "nonsense"}}), Error);
  EXPECT_THROW(ScalarField::polynomial_clamped({0, 1}, 0, 1), Error);
}

TEST(ScalarField, TabulatedIsNotC1AndInterpolates) {
  const auto t = ScalarField::tabulated_1d({0, 1, 3}, {0, 2, 0});
  EXPECT_FALSE(t.is_c1());
  EXPECT_DOUBLE_EQ(t(v1(0.5)), 1.0);
  EXPECT_DOUBLE_EQ(t(v1(2.0)), 1.0);
  EXPECT_DOUBLE_EQ(t(v1(-4.0)), 0.0);
  EXPECT_TRUE(ScalarField::arctan().is_c1());
}

TEST(ScalarField, DerivativeSelfCheckOnAllFamilies) {
  const auto e2 = MinkowskiNormField::euclidean(2);
  Vec g(2);
  g << 0.3, -1.1;
  Vec c(2);
  c << 0.1, 0.2;
  const std::vector<ScalarField> one_d{
      ScalarField::constant(3),
      ScalarField::affine(v1(2.0), 1),
      ScalarField::arctan(1.5, 2.0, -0.5, 0.1),
      ScalarField::phi(),
      ScalarField::neg_phi(),
      ScalarField::polynomial_clamped({0, 0, 3, -2}, 0, 1),
      ScalarField::mollified_1d(ScalarField::tabulated_1d({-1, 0, 1}, {0, 1, 0}), 0.2),
      ScalarField::arctan().times(ScalarField::phi()),
      ScalarField::arctan().plus(2.0).reciprocal(),
      ScalarField::arctan().compose(isometry::SmoothMap::translation(v1(0.4))),
  };
  std::vector<Vec> xs;
  for (double x : {-2.3, -0.7, 0.13, 0.55, 1.9}) xs.push_back(v1(x));
  for (const auto& f : one_d) EXPECT_TRUE(derivative_self_check(f, xs).pass) << f.to_json().dump();

  std::vector<Vec> ps;
  for (double a : {-0.6, 0.35, 0.8}) {
    Vec p(2);
    p << a, 0.5 - a;
    ps.push_back(p);
  }
  EXPECT_TRUE(derivative_self_check(ScalarField::affine(g, 0.0), ps).pass);
  EXPECT_TRUE(derivative_self_check(ScalarField::smooth_truncated_distance(e2, c, 0.1), ps).pass);
  EXPECT_TRUE(derivative_self_check(ScalarField::arctan(1, 2, 0, 0, 1), ps).pass);
}

TEST(DualNorm, OneDimensionalTwoEndpoint) {
  const auto f = MinkowskiNormField::example31();
  // v+ = 1 / (1 - phi'), v- = -1 / (1 + phi').
  for (double x : {-3.0, 0.0, 1.0, 7.5}) {
    const double dp = x * x / (1 + x * x);
    for (double g : {-2.0, 0.5, 3.0}) {
      const double want = std::max(g / (1 - dp), -g / (1 + dp));
      EXPECT_NEAR(dual_asym_norm(f, v1(x), v1(g)), want, 1e-12 * std::abs(want));
    }
  }
}

TEST(DualNorm, SampledMatchesClosedFormRanders) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int dim : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      Mat l = Mat::Random(dim, dim);
      Mat a = l * l.transpose() + Mat::Identity(dim, dim);
      Vec b(dim), g(dim);
      for (int i = 0; i < dim; ++i) {
        b[i] = n(rng);
        g[i] = n(rng);
      }
      const double bn = std::sqrt(b.dot(a.inverse() * b));
      b *= 0.7 * std::abs(std::tanh(n(rng))) / bn;
      const auto field = MinkowskiNormField::randers(a, b);
      const double want = oracle::randers_dual(a, b, g);
      EXPECT_NEAR(dual_asym_norm(field, Vec::Zero(dim), g), want, 1e-8 * want);
      EXPECT_NEAR(randers_dual_norm(field, Vec::Zero(dim), g), want, 1e-12 * want);
    }
  }
}

TEST(DualNorm, DenseScanAgreesIn2d) {
  Vec b(2);
  b << 0.4, -0.3;
  const auto field = MinkowskiNormField::randers(Mat::Identity(2, 2), b);
  Vec g(2);
  g << -1.0, 2.0;
  const double scan = oracle::dual_scan_2d([&](const Eigen::VectorXd& v) { return field(Vec::Zero(2), v); }, g);
  EXPECT_GE(dual_asym_norm(field, Vec::Zero(2), g), scan - 1e-12);
  EXPECT_NEAR(dual_asym_norm(field, Vec::Zero(2), g), scan, 1e-8);
  EXPECT_THROW(dual_asym_norm(MinkowskiNormField::randers(Mat::Identity(2, 2), 2 * b), Vec::Zero(2), g), Error);
}

TEST(DerivativeNorm, Examples) {
  const auto chart = ex31(-10, 10, 201);
  EXPECT_NEAR(derivative_asym_norm(chart, ScalarField::neg_phi(), v1(1)), 1.0 / 3.0, 1e-15);
  for (double x : {-4.0, 0.0, 2.0, 9.0}) {
    EXPECT_NEAR(derivative_asym_norm(chart, ScalarField::arctan(), v1(x)), 1.0, 1e-14);
  }
  const FinslerChart plane({Vec::Constant(2, -1), Vec::Constant(2, 1)}, MinkowskiNormField::euclidean(2), {3, 3});
  Vec g(2);
  g << 3, 4;
  EXPECT_NEAR(derivative_asym_norm(plane, ScalarField::affine(g, 0), Vec::Zero(2)), 5.0, 1e-9);
}

TEST(DerivativeNorm, SupremumAndDivergence) {
  const auto chart = ex31(-50, 50, 101);
  const auto xs = line_points(-50, 50, 10000);
  const auto neg = sup_derivative_norm(chart, ScalarField::neg_phi(), xs);
  EXPECT_FALSE(neg.diverges);
  EXPECT_GE(neg.supremum, 0.499);
  EXPECT_LE(neg.supremum, 0.5);
  const auto big = ex31(0, 1e4, 2);
  std::vector<Vec> grow;
  for (int k = 0; k <= 40; ++k) grow.push_back(v1(std::pow(10.0, k / 10.0)));
  const auto pos = sup_derivative_norm(big, ScalarField::phi(), grow);
  EXPECT_TRUE(pos.diverges);
  EXPECT_TRUE(std::isinf(pos.supremum));
  EXPECT_EQ(sup_derivative_norm(chart, ScalarField::constant(2), xs).supremum, 0.0);
  EXPECT_THROW(sup_derivative_norm(chart, ScalarField::constant(2), {}), Error);
}

TEST(Divergence, Rule) {
  EXPECT_TRUE(is_diverging({1, 10, 1e3, 1e7}));
  EXPECT_FALSE(is_diverging({1, 1e7, 1}));  // single spike, no run
  EXPECT_TRUE(is_diverging({1, oracle::inf}));
  EXPECT_FALSE(is_diverging({0.1, 0.2, 0.3}));
}

TEST(SlipEquality, ArctanAndNegPhi) {
  const auto chart = ex31(-50, 50, 101);
  const auto xs = line_points(-50, 50, 10000);
  const auto pairs = adjacent_pairs(xs);
  const auto at = verify_slip_equals_derivative_sup(chart, ScalarField::arctan(), xs, pairs, 1e-6);
  EXPECT_TRUE(at.pass);
  EXPECT_NEAR(at.s1, 1.0, 1e-9);
  EXPECT_NEAR(at.s2, 1.0, 1e-12);
  const auto neg = verify_slip_equals_derivative_sup(chart, ScalarField::neg_phi(), xs, pairs, 1e-2);
  EXPECT_TRUE(neg.pass);
  EXPECT_NEAR(neg.s1, neg.s2, 1e-2);
  EXPECT_NEAR(neg.s1, 0.5, 1e-3);
  const auto flat = verify_slip_equals_derivative_sup(chart, ScalarField::constant(1), xs, pairs, 1e-6);
  EXPECT_TRUE(flat.pass);
  EXPECT_EQ(flat.s1, 0.0);
  EXPECT_EQ(flat.s2, 0.0);
}

TEST(SlipEquality, SubsetMonotonicity) {
  const auto chart = ex31(-5, 5, 101);
  const auto xs = line_points(-5, 5, 200);
  const auto all = adjacent_pairs(xs);
  const std::vector<finsler::PointPair> some(all.begin(), all.begin() + 150);
  const auto f = ScalarField::arctan(1, 3, 0.5).times(ScalarField::neg_phi());
  EXPECT_LE(empirical_slip(chart, f, some).value, empirical_slip(chart, f, all).value);
}

TEST(SlipEquality, LocalPiecesGiveGlobalConstant) {
  // Overlapping intervals cover [-5, 5]; adjacent pairs of the pieces are the global pairs.
  const auto chart = ex31(-5, 5, 101);
  const auto xs = line_points(-5, 5, 400);
  const auto f = ScalarField::arctan(2, 1.3).plus(1).times(ScalarField::arctan(1, 0.2));
  const double global = empirical_slip(chart, f, adjacent_pairs(xs)).value;
  double local = 0.0;
  for (std::size_t start : {0u, 120u, 250u}) {
    const std::size_t stop = std::min<std::size_t>(xs.size(), start + 160);
    const std::vector<Vec> piece(xs.begin() + start, xs.begin() + stop);
    local = std::max(local, empirical_slip(chart, f, adjacent_pairs(piece)).value);
  }
  EXPECT_NEAR(local, global, 1e-9);
  // The line shortcut agrees with the pair search.
  std::vector<double> grid, values;
  for (const auto& x : xs) {
    grid.push_back(x[0]);
    values.push_back(f(x));
  }
  EXPECT_NEAR(slip_on_line(chart, grid, values).value, global, 1e-12);
}

TEST(Smoothing, TruncatedDistanceOnIndexZeroLine) {
  const auto chart = ex31(-2, 3, 501);
  std::vector<double> xs, ys;
  for (int k = 0; k <= 500; ++k) {
    const double u = -2 + 0.01 * k;
    xs.push_back(u);
    ys.push_back(std::min(oracle::line_distance(0, u), 1.0));
  }
  const auto f = ScalarField::tabulated_1d(xs, ys);
  const auto r = smooth_approximate_1d(chart, f, [](double) { return 0.01; }, 0.05);
  EXPECT_FALSE(r.unchanged);
  EXPECT_TRUE(r.g.is_c1());
  // The table is piecewise linear, so its slip is a chord slope over the
  // norm at some point of the chord rather than exactly 1.
  double chord = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double slope = (ys[k + 1] - ys[k]) / 0.01;
    for (double t : {xs[k], xs[k + 1]}) {
      const double d = 1.0 - t * t / (1.0 + t * t);
      chord = std::max({chord, slope / d, -slope / (2.0 - d)});
    }
  }
  EXPECT_GE(r.slip_f, 1.0);
  EXPECT_LE(r.slip_f, chord + 1e-12);
  EXPECT_LE(r.slip_g, r.slip_f + 0.05);
  // Re-check both clauses independently on the verification grid.
  double dev = 0.0;
  for (double x : r.grid) dev = std::max(dev, std::abs(r.g(v1(x)) - f(v1(x))));
  EXPECT_LE(dev, 0.01);
  EXPECT_NEAR(dev, r.max_deviation, 1e-15);
}

TEST(Smoothing, SmoothInputUnchanged) {
  const auto chart = ex31(-2, 3, 501);
  const auto r = smooth_approximate_1d(chart, ScalarField::arctan(), [](double) { return 0.01; }, 0.01);
  EXPECT_TRUE(r.unchanged);
  EXPECT_DOUBLE_EQ(r.g(v1(0.7)), std::atan(0.7));
}

TEST(Smoothing, KinkInEuclideanChart) {
  const FinslerChart chart({v1(-1), v1(1)}, MinkowskiNormField::euclidean(1), {201});
  std::vector<double> xs, ys;
  for (int k = 0; k <= 200; ++k) {
    xs.push_back(-1 + 0.01 * k);
    ys.push_back(std::min(xs.back(), 0.2));
  }
  const auto r = smooth_approximate_1d(chart, ScalarField::tabulated_1d(xs, ys), [](double) { return 0.005; }, 0.01);
  EXPECT_LE(r.max_deviation, 0.005);
  EXPECT_LE(r.slip_g, 1.01);
  EXPECT_GT(r.width, 0.0);
}

TEST(Smoothing, Errors) {
  const FinslerChart chart({v1(-1), v1(1)}, MinkowskiNormField::euclidean(1), {201});
  const auto t = ScalarField::tabulated_1d({-1, 1}, {0, 1});
  EXPECT_THROW(smooth_approximate_1d(chart, t, [](double) { return 0.01; }, 0.0), Error);
  EXPECT_THROW(smooth_approximate_1d(chart, t, [](double) { return -1.0; }, 0.1), Error);
}

TEST(Example34, Entries) {
  std::vector<double> xs;
  for (int k = -40; k <= 40; ++k) xs.push_back(k < 0 ? -std::pow(10.0, -k / 8.0) : std::pow(10.0, k / 8.0));
  xs.push_back(0.0);
  std::sort(xs.begin(), xs.end());
  const auto r = example34_ratio_experiment(
      {{"arctan", ScalarField::arctan()}, {"u", ScalarField::affine(v1(1), 0)}, {"c", ScalarField::constant(4)}}, xs);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_NEAR(r.entries[0].classical, 1.0, 1e-9);
  EXPECT_NEAR(r.entries[0].finsler, 1.0, 1e-12);
  EXPECT_TRUE(r.entries[1].finsler_diverges);
  EXPECT_FALSE(r.entries[1].stated_upper_holds);
  EXPECT_EQ(r.entries[2].classical, 0.0);
  EXPECT_EQ(r.entries[2].finsler, 0.0);
  EXPECT_TRUE(r.lower_holds_all);
}
