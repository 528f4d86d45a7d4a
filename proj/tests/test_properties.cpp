#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "finslerq/conealg.hpp"
#include "finslerq/isometry.hpp"
#include "finslerq/quasimetric.hpp"
#include "finslerq/semilip.hpp"
#include "support/oracles.hpp"

// Randomized checks of structural invariants. Every generator is seeded so
// failures reproduce.

using namespace finslerq;
using finsler::FinslerChart;
using finsler::MinkowskiNormField;
using semilip::ScalarField;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v1(double x) { return Vec::Constant(1, x); }
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

MinkowskiNormField random_randers_2d(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Mat l(2, 2);
  l << 1 + 0.5 * std::abs(u(rng)), 0, 0.4 * u(rng), 1 + 0.5 * std::abs(u(rng));
  const Mat a = l * l.transpose();
  Vec b = v2(u(rng), u(rng));
  // keep |b| in the A^-1 norm below 0.8
  const double len = std::sqrt(b.dot(a.inverse() * b));
  if (len > 0.8) b *= 0.8 / len;
  return MinkowskiNormField::randers(a, b);
}

}  // namespace

TEST(QuasiMetricProperties, SymmetrizeReverseIndexAndSlip) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> val(-10, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto m = oracle::random_quasi_metric(rng, n);
    const quasimetric::FiniteSpace s(names(n), m);
    ASSERT_TRUE(quasimetric::validate_space(s).valid());
    EXPECT_LE(oracle::triangle_defect(m), 0.0);
    EXPECT_EQ(quasimetric::index_of_symmetry(quasimetric::symmetrize(s)).index, 1.0);
    EXPECT_EQ(quasimetric::reverse(quasimetric::reverse(s)).matrix(), m);
    EXPECT_EQ(quasimetric::reverse(s).matrix(), oracle::transpose(m));
    EXPECT_DOUBLE_EQ(quasimetric::index_of_symmetry(s).index, oracle::index(m));
    std::vector<double> f(n);
    for (auto& x : f) x = std::round(val(rng));
    EXPECT_EQ(quasimetric::slip_constant(f, s), oracle::slip(f, m));
    // slip of f for d equals slip of -f for the reversed distance
    std::vector<double> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = -f[i];
    EXPECT_EQ(quasimetric::slip_constant(neg, quasimetric::reverse(s)), oracle::slip(f, m));
  }
}

TEST(QuasiMetricProperties, LinearityTracksIndexSign) {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 60; ++trial) {
    const bool hemi = trial % 2;
    const auto s = quasimetric::random_space(
        rng, 3 + trial % 6, hemi ? quasimetric::SeparationMode::QuasiHemiMetric : quasimetric::SeparationMode::QuasiMetric,
        hemi ? 0.3 : 0.0);
    const auto v = quasimetric::slip0_linearity(s);
    EXPECT_EQ(v.linear, v.index > 0.0);
    if (v.witness) {
      EXPECT_EQ(oracle::slip(*v.witness, s.matrix()), v.witness_slip);
      std::vector<double> neg;
      for (double x : *v.witness) neg.push_back(-x);
      EXPECT_TRUE(std::isinf(oracle::slip(neg, s.matrix())));
    }
  }
}

TEST(FinslerProperties, GraphBoundsAndRefinement) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int trial = 0; trial < 10; ++trial) {
    const FinslerChart chart({v2(-1, -1), v2(1, 1)}, random_randers_2d(rng), {11, 11});
    for (int k = 0; k < 5; ++k) {
      const Vec p = v2(u(rng), u(rng)), q = v2(u(rng), u(rng));
      const double exact = *finsler::oracle_distance(chart, p, q);
      const auto g = finsler::finsler_distance_graph(chart, p, q);
      EXPECT_GE(g.value, exact - 1e-12);
      const auto r = finsler::finsler_distance_refine(chart, g.path);
      EXPECT_LE(r.value, r.initial + 1e-15);
      EXPECT_GE(r.value, exact - 1e-9);
    }
  }
}

TEST(FinslerProperties, ReversibleFieldsAreSymmetric) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  Mat a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  const FinslerChart chart({v2(-1, -1), v2(1, 1)}, MinkowskiNormField::riemannian(a), {15, 15});
  for (int k = 0; k < 20; ++k) {
    const Vec p = v2(u(rng), u(rng)), q = v2(u(rng), u(rng));
    EXPECT_NEAR(finsler::finsler_distance_graph(chart, p, q).value,
                finsler::finsler_distance_graph(chart, q, p).value, 1e-9);
  }
}

TEST(FinslerProperties, NestedGridsNeverIncreaseDistances) {
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 5; ++trial) {
    const auto field = random_randers_2d(rng);
    const FinslerChart coarse({v2(-1, -1), v2(1, 1)}, field, {9, 9});
    const FinslerChart fine({v2(-1, -1), v2(1, 1)}, field, {17, 17});
    const Vec x = coarse.node(3 * 9 + 5);
    const auto dc = finsler::grid_distances_from(coarse, x);
    const auto df = finsler::grid_distances_from(fine, x);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        const std::size_t c = static_cast<std::size_t>(i) * 9 + j;
        const std::size_t f = static_cast<std::size_t>(2 * i) * 17 + 2 * j;
        ASSERT_LT((coarse.node(c) - fine.node(f)).norm(), 1e-12);
        EXPECT_LE(df[f], dc[c] + 1e-12);
      }
  }
}

TEST(FinslerProperties, IndexZeroTriangleInequality) {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    EXPECT_LE(oracle::line_distance(a, c), oracle::line_distance(a, b) + oracle::line_distance(b, c) + 1e-12);
    EXPECT_GE(oracle::line_distance(a, b), 0.0);
  }
}

TEST(DualProperties, SampledDualIsALowerBound) {
  std::mt19937_64 rng(107);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 30; ++trial) {
    const auto field = random_randers_2d(rng);
    const Vec g = v2(n(rng), n(rng));
    const double sampled = semilip::dual_asym_norm(field, v2(0, 0), g);
    const double exact = oracle::randers_dual(field.metric(), field.drift_offset(), g);
    EXPECT_LE(sampled, exact * (1 + 1e-12));
    EXPECT_NEAR(sampled, exact, 1e-8 * exact);
    // Any unit vector gives a lower bound.
    for (int k = 0; k < 8; ++k) {
      const Vec v = v2(std::cos(k), std::sin(k));
      EXPECT_LE(g.dot(v) / field(v2(0, 0), v), sampled + 1e-12);
    }
  }
}

TEST(ConeProperties, ClosureAndProductBound) {
  const auto domain =
      conealg::grid_domain(FinslerChart({v1(-5), v1(5)}, MinkowskiNormField::example31(), {501}));
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto draw = [&] {
    const double amp = u(rng);
    return conealg::certify(ScalarField::arctan(amp, 0.8 * u(rng), u(rng), std::abs(amp) * kPi / 2 + 0.5 + u(rng) * 0.4),
                            domain);
  };
  for (int k = 0; k < 40; ++k) {
    const auto a = draw(), b = draw();
    const double lambda = 3 * std::abs(u(rng));
    const auto s = conealg::cone_sum(a, b);
    EXPECT_LE(s.hemi_norm(), a.hemi_norm() + b.hemi_norm() + 1e-12);
    EXPECT_NEAR(conealg::cone_scale(a, lambda).hemi_norm(), lambda * a.hemi_norm(), 1e-12);
    EXPECT_TRUE(conealg::within_product_bound(a, b, conealg::cone_product(a, b)));
    // Two representations of the same function have the same extended norm.
    const conealg::SpanElement one = conealg::SpanElement::from_cone(a);
    const conealg::SpanElement other(conealg::cone_sum(a, b), b);
    EXPECT_TRUE(conealg::equal_on_domain(one, other));
    EXPECT_NEAR(conealg::extended_norm(one), conealg::extended_norm(other), 1e-9);
  }
}

TEST(IsometryProperties, MetricAndInfinitesimalVerdictsAgree) {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(-1, 1);
  const FinslerChart x({v2(-1, -1), v2(1, 1)}, MinkowskiNormField::euclidean(2), {5, 5});
  const FinslerChart y({v2(-3, -3), v2(3, 3)}, MinkowskiNormField::euclidean(2), {5, 5});
  const FinslerChart xr({v2(-1, -1), v2(1, 1)}, MinkowskiNormField::randers(Mat::Identity(2, 2), v2(0.4, 0)), {5, 5});
  const FinslerChart yr({v2(-3, -3), v2(3, 3)}, MinkowskiNormField::randers(Mat::Identity(2, 2), v2(0.4, 0)), {5, 5});
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<finsler::PointPair> pairs;
    for (int k = 0; k < 30; ++k) pairs.emplace_back(v2(u(rng), u(rng)), v2(u(rng), u(rng)));
    const double angle = kPi * u(rng);
    Mat m(2, 2);
    m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const bool shear = trial % 2;
    if (shear) m(0, 1) += 0.5;
    const auto h = isometry::SmoothMap::affine(m, v2(0.5 * u(rng), 0.5 * u(rng)));
    const auto flat = isometry::check_metric_isometry(x, y, h, pairs, 1e-9);
    EXPECT_EQ(flat.pass, !shear);
    EXPECT_TRUE(flat.agrees_with_infinitesimal);
    // Rotations move the drift, so only translations survive on the Randers plane.
    const auto skew = isometry::check_metric_isometry(xr, yr, h, pairs, 1e-9);
    EXPECT_FALSE(skew.pass);
    EXPECT_TRUE(skew.agrees_with_infinitesimal);
    const auto shift = isometry::check_metric_isometry(
        xr, yr, isometry::SmoothMap::translation(v2(u(rng), u(rng))), pairs, 1e-9);
    EXPECT_TRUE(shift.pass);
    EXPECT_TRUE(shift.agrees_with_infinitesimal);
  }
}
