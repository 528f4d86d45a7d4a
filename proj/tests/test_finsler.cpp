#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "finslerq/codec.hpp"
#include "finslerq/errors.hpp"
#include "finslerq/finsler.hpp"
#include "support/oracles.hpp"

using namespace finslerq;
using namespace finslerq::finsler;

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

MinkowskiNormField randers2(double bx, double by) {
  return MinkowskiNormField::randers(Mat::Identity(2, 2), v2(bx, by));
}

}  // namespace

TEST(NormField, IndexZeroLineValues) {
  const auto f = MinkowskiNormField::example31();
  EXPECT_DOUBLE_EQ(f(v1(1), v1(1)), 0.5);
  EXPECT_DOUBLE_EQ(f(v1(1), v1(-1)), 1.5);
  EXPECT_DOUBLE_EQ(example31_dphi(1.0), 0.5);
  EXPECT_NEAR(example31_phi(1.0), 1.0 - kPi / 4, 1e-15);
  // No cancellation far out: F(x, 1) = 1 / (1 + x^2).
  EXPECT_NEAR(f(v1(1e8), v1(1)) * 1e16, 1.0, 1e-12);
  EXPECT_GT(f.minkowski_margin(v1(1e8)), 0.0);
}

TEST(NormField, RandersMatchesDirectFormula) {
  Mat a(2, 2);
  a << 2.0, 0.3, 0.3, 1.0;
  const Vec b = v2(0.2, -0.4);
  const auto f = MinkowskiNormField::randers(a, b);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    const Vec v = v2(n(rng), n(rng));
    EXPECT_NEAR(f(Vec::Zero(2), v), oracle::randers(a, b, v), 1e-14);
  }
  EXPECT_THROW(MinkowskiNormField::riemannian(-Mat::Identity(2, 2)), Error);
}

TEST(ValidateMinkowski, EuclideanCleanDriftTooLargeReported) {
  std::vector<Vec> xs{v2(0, 0), v2(0.5, -0.5)};
  std::vector<Vec> vs{v2(1, 0), v2(0, 1), v2(-1, 0.3), v2(0.2, -0.9)};
  EXPECT_TRUE(validate_minkowski(MinkowskiNormField::euclidean(2), xs, vs).valid());
  const auto bad = validate_minkowski(randers2(1.2, 0.0), xs, vs);
  EXPECT_FALSE(bad.valid());
  bool drift_or_sign = false;
  for (const auto& v : bad.violations) drift_or_sign |= v.check == "drift" || v.check == "separation";
  EXPECT_TRUE(drift_or_sign);
}

TEST(PathLength, ClosedForms) {
  const FinslerChart plane({v2(-5, -5), v2(5, 5)}, MinkowskiNormField::euclidean(2), {11, 11});
  EXPECT_NEAR(path_length(plane, {{v2(0, 0), v2(3, 4)}}), 5.0, 1e-14);
  const FinslerChart skew({v2(-2, -2), v2(2, 2)}, randers2(0.5, 0.0), {5, 5});
  EXPECT_NEAR(path_length(skew, {{v2(0, 0), v2(1, 0)}}), 1.5, 1e-14);
  EXPECT_NEAR(path_length(skew, {{v2(1, 0), v2(0, 0)}}), 0.5, 1e-14);
  const auto ex31 = line(MinkowskiNormField::example31(), -2, 3, 501);
  EXPECT_NEAR(path_length(ex31, {{v1(0), v1(1)}}), kPi / 4, 1e-9);
  try {
    path_length(ex31, {{v1(0), v1(4)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfDomain);
  }
}

TEST(PathLength, ParameterizationInvariance) {
  const auto ex31 = line(MinkowskiNormField::example31(), -2, 3, 51);
  const double whole = path_length(ex31, {{v1(-1.5), v1(2.5)}});
  PiecewisePath split;
  for (int k = 0; k <= 40; ++k) split.nodes.push_back(v1(-1.5 + 4.0 * k / 40));
  EXPECT_NEAR(path_length(ex31, split), whole, 1e-6);
  EXPECT_NEAR(path_length(ex31, split), oracle::line_distance(-1.5, 2.5), 1e-12);
}

TEST(Graph, IndexZeroLineWithinTolerance) {
  const auto chart = line(MinkowskiNormField::example31(), -2, 3, 501);
  EXPECT_NEAR(finsler_distance_graph(chart, v1(0), v1(1)).value, kPi / 4, 1e-3);
  EXPECT_NEAR(finsler_distance_graph(chart, v1(1), v1(0)).value, 2 - kPi / 4, 1e-3);
  const auto g = finsler_distance_graph(chart, v1(0), v1(1));
  EXPECT_NEAR(finsler_distance_refine(chart, g.path).value, kPi / 4, 1e-6);
}

TEST(Graph, RandersPlaneStencilAndRefinement) {
  const FinslerChart chart({v2(-1, -1), v2(2, 1)}, randers2(0.5, 0.0), {31, 21}, 2);
  const auto g = finsler_distance_graph(chart, v2(0, 0), v2(1, 0));
  EXPECT_NEAR(g.value, 1.5, 0.03);
  EXPECT_NEAR(finsler_distance_refine(chart, g.path).value, 1.5, 1e-4);
}

TEST(Graph, OffGridTargetRefinesToStraightLine) {
  const FinslerChart chart({v2(-1, -1), v2(1, 1)}, randers2(0.5, 0.0), {11, 11});
  const Vec y = v2(0.33, 0.71);
  const double exact = y.norm() + 0.5 * 0.33;
  const auto g = finsler_distance_graph(chart, v2(0, 0), y);
  EXPECT_GE(g.value, exact - 1e-12);
  const auto r = finsler_distance_refine(chart, g.path);
  EXPECT_LE(r.value, g.value);
  EXPECT_NEAR(r.value, exact, 1e-4);
  ASSERT_TRUE(oracle_distance(chart, v2(0, 0), y).has_value());
  EXPECT_NEAR(*oracle_distance(chart, v2(0, 0), y), exact, 1e-14);
}

TEST(Refine, ZigzagStraightens) {
  const FinslerChart chart({v2(-1, -1), v2(2, 1)}, MinkowskiNormField::euclidean(2), {4, 3});
  const auto r = finsler_distance_refine(chart, {{v2(0, 0), v2(0.5, 0.3), v2(1, 0)}});
  EXPECT_NEAR(r.value, 1.0, 1e-6);
  EXPECT_GT(r.initial, r.value);
}

TEST(Randers1d, ClosedAndQuadrature) {
  EXPECT_NEAR(randers_1d_distance(DriftSpec::example31(), 0, 1), kPi / 4, 1e-15);
  EXPECT_NEAR(randers_1d_distance(DriftSpec::example31(), 1, 0), 2 - kPi / 4, 1e-15);
  EXPECT_NEAR(randers_1d_distance(DriftSpec::custom([](double) { return 0.0; }), 2, -1.5), 3.5, 1e-14);
  const auto dphi = [](double t) { return 0.5 * std::sin(t); };
  const double want = oracle::simpson([&](double t) { return 1.0 - dphi(t); }, -1.0, 2.0);
  EXPECT_NEAR(randers_1d_distance(DriftSpec::custom(dphi), -1, 2), want, 1e-10);
  const double back = oracle::simpson([&](double t) { return 1.0 + dphi(t); }, -1.0, 2.0);
  EXPECT_NEAR(randers_1d_distance(DriftSpec::custom(dphi), 2, -1), back, 1e-10);
  try {
    randers_1d_distance(DriftSpec::custom([](double t) { return t; }), 0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidStructure);
  }
}

TEST(DistanceOp, AutoUsesOracleWhenAvailable) {
  const auto chart = line(MinkowskiNormField::example31(), -2, 3, 501);
  const auto r = finsler_distance(chart, v1(0), v1(1));
  EXPECT_EQ(r.method, "oracle");
  EXPECT_DOUBLE_EQ(r.value, oracle::line_distance(0, 1));
  EXPECT_EQ(distance_method_from_string("graph+refine"), DistanceMethod::GraphRefined);
  EXPECT_THROW(distance_method_from_string("magic"), Error);
}

TEST(ChartIndex, ConstantRandersApproachesOneThird) {
  const FinslerChart chart({v2(-1, -1), v2(1, 1)}, randers2(0.5, 0.0), {11, 11});
  const auto r = chart_index_of_symmetry(chart, {{v2(-0.5, 0), v2(0.5, 0)}, {v2(0, -0.5), v2(0, 0.5)}});
  EXPECT_NEAR(r.index, 1.0 / 3.0, 1e-12);
  ASSERT_TRUE(r.certified_lower.has_value());
  EXPECT_NEAR(*r.certified_lower, 1.0 / 3.0, 1e-15);
  const FinslerChart flat({v2(-1, -1), v2(1, 1)}, MinkowskiNormField::euclidean(2), {11, 11});
  EXPECT_DOUBLE_EQ(chart_index_of_symmetry(flat, {{v2(-0.5, 0.1), v2(0.5, 0.3)}}).index, 1.0);
}

TEST(ChartIndex, IndexZeroLineDecays) {
  const auto chart = line(MinkowskiNormField::example31(), -1, 22, 2301);
  const auto r = chart_index_of_symmetry(chart, {{v1(0), v1(1)}, {v1(5), v1(6)}, {v1(20), v1(21)}});
  EXPECT_EQ(r.evidence, quasimetric::SymmetryEvidence::DecayingToZero);
  EXPECT_FALSE(r.certified_lower.has_value());
  for (double x : {0.0, 5.0, 20.0}) {
    const double got = finsler_distance(chart, v1(x), v1(x + 1), DistanceMethod::GraphRefined).value /
                       finsler_distance(chart, v1(x + 1), v1(x), DistanceMethod::GraphRefined).value;
    EXPECT_NEAR(got, oracle::symmetry_ratio(x), 1e-3);
  }
}

TEST(Codec, ChartRoundTrip) {
  const FinslerChart chart({v2(-1, -2), v2(1, 2)}, randers2(0.1, 0.2), {5, 9}, 1);
  const auto back = codec::chart_from_json(codec::chart_to_json(chart));
  EXPECT_EQ(back.grid(), chart.grid());
  EXPECT_EQ(back.stencil(), 1);
  EXPECT_DOUBLE_EQ(back.field()(v2(0, 0), v2(1, 1)), chart.field()(v2(0, 0), v2(1, 1)));
  const auto from_step = codec::chart_from_json(
      nlohmann::json::parse(R"({"family":"example31","box":[[-2,3]],"step":0.01})"));
  EXPECT_EQ(from_step.grid()[0], 501);
  EXPECT_THROW(codec::chart_from_json(nlohmann::json::parse(R"({"family":"example31"})")), Error);
}
