#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "finslerq/errors.hpp"
#include "finslerq/isometry.hpp"
#include "support/oracles.hpp"

using namespace finslerq;
using namespace finslerq::isometry;
using finsler::MinkowskiNormField;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v1(double x) { return Vec::Constant(1, x); }
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

FinslerChart line(MinkowskiNormField f, double lo, double hi, int nodes) {
  return FinslerChart({v1(lo), v1(hi)}, std::move(f), {nodes});
}

MinkowskiNormField randers_line(double b) { return MinkowskiNormField::randers(Mat::Identity(1, 1), v1(b)); }

std::vector<PointPair> random_line_pairs(double lo, double hi, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<PointPair> out;
  for (int i = 0; i < count; ++i) out.emplace_back(v1(u(rng)), v1(u(rng)));
  return out;
}

std::vector<TangentSample> line_tangents(double lo, double hi) {
  std::vector<TangentSample> out;
  for (int k = 0; k <= 20; ++k) {
    const double x = lo + (hi - lo) * k / 20;
    out.emplace_back(v1(x), v1(1));
    out.emplace_back(v1(x), v1(-0.5));
  }
  return out;
}

}  // namespace

TEST(SmoothMap, SelfChecks) {
  std::vector<Vec> line_samples;
  for (int k = -10; k <= 10; ++k) line_samples.push_back(v1(0.3 * k));
  EXPECT_TRUE(self_check(SmoothMap::translation(v1(0.7)), line_samples).pass);
  const auto table = SmoothMap::tabulated_monotone_1d({-1, 0, 1}, {-1, -0.2, 1.5});
  const auto r = self_check(table, line_samples);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_roundtrip_error, 1e-9);
  EXPECT_THROW(SmoothMap::tabulated_monotone_1d({0, 1}, {1, 0}), Error);
  Mat m(2, 2);
  m << std::cos(0.6), -std::sin(0.6), std::sin(0.6), std::cos(0.6);
  const auto rot = SmoothMap::affine(m, v2(0.1, 0));
  EXPECT_NEAR((rot.inverted()(rot(v2(0.4, -0.3))) - v2(0.4, -0.3)).norm(), 0.0, 1e-14);
  EXPECT_THROW(SmoothMap::affine(Mat::Zero(2, 2), v2(0, 0)), Error);
}

TEST(FinslerIsometry, IdentityTranslationAndFailure) {
  const auto ex31 = line(MinkowskiNormField::example31(), -2, 3, 51);
  const auto id = check_finsler_isometry(ex31, ex31, SmoothMap::identity(1), line_tangents(-2, 3), 1e-9);
  EXPECT_TRUE(id.pass);
  EXPECT_EQ(id.max_defect, 0.0);

  const auto rx = line(randers_line(0.3), -2, 2, 41);
  const auto ry = line(randers_line(0.3), -2, 3, 51);
  EXPECT_TRUE(check_finsler_isometry(rx, ry, SmoothMap::translation(v1(0.7)), line_tangents(-2, 2), 1e-12).pass);

  // The index-zero field depends on the base point, so shifts are not isometries.
  const auto shifted = check_finsler_isometry(ex31, line(MinkowskiNormField::example31(), -2, 4, 61),
                                              SmoothMap::translation(v1(0.7)), line_tangents(-2, 3), 1e-3);
  EXPECT_FALSE(shifted.pass);
}

TEST(MetricIsometry, DilationDefectIsTheDistance) {
  const auto x = line(MinkowskiNormField::euclidean(1), -3, 3, 61);
  const auto y = line(MinkowskiNormField::euclidean(1), -6, 6, 121);
  const auto dil = SmoothMap::affine(Mat::Constant(1, 1, 2.0), v1(0));
  const auto r = check_metric_isometry(x, y, dil, {{v1(0), v1(1)}, {v1(-2), v1(0.5)}}, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max_defect, 2.5, 1e-12);
  EXPECT_TRUE(r.agrees_with_infinitesimal);

  const auto rx = line(randers_line(0.3), -2, 2, 41);
  const auto ry = line(randers_line(0.3), -2, 3, 51);
  const auto ok = check_metric_isometry(rx, ry, SmoothMap::translation(v1(0.7)), random_line_pairs(-2, 2, 200, 3), 1e-9);
  EXPECT_TRUE(ok.pass);
  EXPECT_TRUE(ok.agrees_with_infinitesimal);
}

TEST(MapSlips, ExactIsometryIsOneAndIdentityIntoRanders) {
  const auto rx = line(randers_line(0.3), -2, 2, 41);
  const auto ry = line(randers_line(0.3), -2, 3, 51);
  const auto s = map_slip_constants(SmoothMap::translation(v1(0.7)), rx, ry, random_line_pairs(-2, 2, 200, 4));
  EXPECT_NEAR(s.forward, 1.0, 1e-9);
  EXPECT_NEAR(s.backward, 1.0, 1e-9);

  const FinslerChart flat({v2(-1, -1), v2(1, 1)}, MinkowskiNormField::euclidean(2), {11, 11});
  const FinslerChart skew({v2(-1, -1), v2(1, 1)},
                          MinkowskiNormField::randers(Mat::Identity(2, 2), v2(0.5, 0)), {11, 11});
  const std::vector<PointPair> pairs{{v2(0, 0), v2(0.5, 0)}, {v2(0.5, 0), v2(0, 0)}, {v2(0, 0), v2(0, 0.5)}};
  const auto t = map_slip_constants(SmoothMap::identity(2), flat, skew, pairs);
  EXPECT_NEAR(t.forward, 1.5, 1e-12);
  EXPECT_NEAR(t.backward, 2.0, 1e-12);
}

TEST(Composition, IdentityNormOneAndAlgebraIdentities) {
  const auto domain = conealg::grid_domain(line(MinkowskiNormField::example31(), -5, 5, 201));
  const CompositionOperator id(SmoothMap::identity(1), domain, domain);
  const auto dict = standard_dictionary(domain);
  ASSERT_FALSE(dict.empty());
  EXPECT_DOUBLE_EQ(operator_norm_estimate(id, dict).value, 1.0);

  const auto y_chart = line(MinkowskiNormField::euclidean(1), -3, 8, 111);
  const auto shift = CompositionOperator::with_pushforward(SmoothMap::translation(v1(2.5)), domain, y_chart);
  const auto f = conealg::certify(ScalarField::arctan(1, 1, 0, kPi / 2), shift.y_domain());
  const auto g = conealg::certify(ScalarField::arctan(-0.5, 2, -1, 1), shift.y_domain());
  const auto tfg = shift.apply(conealg::cone_product(f, g));
  const auto tf = shift.apply(f), tg = shift.apply(g);
  for (const Vec& x : domain->points) EXPECT_NEAR(tfg(x), tf(x) * tg(x), 1e-15);

  const auto phi = conealg::eval_functional(domain->chart, v1(1)).scaled(2.0) -
                   conealg::eval_functional(domain->chart, v1(-4));
  EXPECT_EQ(conealg::functional_apply(shift.adjoint(phi), f.field()),
            conealg::functional_apply(phi, tf.field()));

  EXPECT_THROW(shift.apply(conealg::certify(ScalarField::constant(1), domain)), Error);
}

TEST(MyersNakai, IdentityAndTranslationAreConsistent) {
  const auto chart = line(MinkowskiNormField::example31(), -5, 5, 201);
  const auto domain = conealg::grid_domain(chart);
  const auto id = CompositionOperator::with_pushforward(SmoothMap::identity(1), domain, chart);
  const auto r = myers_nakai_consistency(id, standard_dictionary(id.y_domain()), standard_dictionary(domain),
                                         random_line_pairs(-5, 5, 100, 7), line_tangents(-5, 5), 1e-9);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.isometry.pass);
  EXPECT_TRUE(r.norms_preserved);

  const auto rx = line(randers_line(0.3), -2, 2, 81);
  const auto ry = line(randers_line(0.3), -2, 3, 101);
  const auto xd = conealg::grid_domain(rx);
  const auto shift = CompositionOperator::with_pushforward(SmoothMap::translation(v1(0.7)), xd, ry);
  const auto s = myers_nakai_consistency(shift, standard_dictionary(shift.y_domain()), standard_dictionary(xd),
                                         random_line_pairs(-2, 2, 100, 8), line_tangents(-2, 2), 1e-6);
  EXPECT_TRUE(s.algebra_pass);
  EXPECT_TRUE(s.bounds_pass);
  EXPECT_TRUE(s.pass);
  EXPECT_GE(s.forward_norm.value, s.slips.forward - 1e-6);
}

TEST(SignCompatibility, ZeroAgainstPositive) {
  quasimetric::AnalyticSpace ex31(quasimetric::AnalyticSpace::Family::Example31, {}, {0, 1, 5, 6, 20, 21});
  const auto zero = quasimetric::index_of_symmetry(ex31, {{0, 1}, {5, 6}, {20, 21}});
  const auto metric = quasimetric::index_of_symmetry(quasimetric::FiniteSpace::from_matrix({{0, 2}, {2, 0}}));
  EXPECT_EQ(symmetry_sign_compatibility(zero, metric).verdict, SignVerdict::Incompatible);
  EXPECT_EQ(symmetry_sign_compatibility(metric, zero).verdict, SignVerdict::Incompatible);

  quasimetric::AnalyticSpace randers(quasimetric::AnalyticSpace::Family::ConstantRanders1d, {0.5}, {0, 1});
  const auto third = quasimetric::index_of_symmetry(randers, {{0, 1}});
  EXPECT_EQ(symmetry_sign_compatibility(metric, third).verdict, SignVerdict::Compatible);
  const auto quarter = quasimetric::index_of_symmetry(quasimetric::FiniteSpace::from_matrix({{0, 1}, {4, 0}}));
  EXPECT_EQ(symmetry_sign_compatibility(quarter, metric).verdict, SignVerdict::Compatible);
  EXPECT_EQ(to_string(SignVerdict::Inconclusive), "inconclusive");
}
