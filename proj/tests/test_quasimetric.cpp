#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "finslerq/codec.hpp"
#include "finslerq/errors.hpp"
#include "finslerq/quasimetric.hpp"
#include "support/oracles.hpp"

using namespace finslerq;
using namespace finslerq::quasimetric;

namespace {

bool has_axiom(const ValidationReport& r, Axiom a) {
  for (const auto& v : r.violations)
    if (v.axiom == a) return true;
  return false;
}

}  // namespace

TEST(FiniteSpace, RejectsMalformedMatrices) {
  EXPECT_THROW(FiniteSpace::from_matrix({{0, 1}, {1}}), Error);
  EXPECT_THROW(FiniteSpace::from_matrix({{0, -1}, {1, 0}}), Error);
  EXPECT_THROW(FiniteSpace::from_matrix({{0, NAN}, {1, 0}}), Error);
  EXPECT_THROW(FiniteSpace({"a", "a"}, {{0, 1}, {1, 0}}), Error);
  try {
    FiniteSpace::from_matrix({{0, 1, 2}, {1, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedInput);
  }
}

TEST(Validate, TwoPointAsymmetricIsValid) {
  EXPECT_TRUE(validate_space(FiniteSpace::from_matrix({{0, 1}, {4, 0}})).valid());
}

TEST(Validate, SeparationDependsOnMode) {
  const auto strict = validate_space(FiniteSpace::from_matrix({{0, 0}, {1, 0}}));
  ASSERT_FALSE(strict.valid());
  EXPECT_EQ(strict.violations[0].axiom, Axiom::Separation);
  EXPECT_EQ(strict.violations[0].witness, (std::vector<std::string>{"p0", "p1"}));
  EXPECT_TRUE(
      validate_space(FiniteSpace::from_matrix({{0, 0}, {1, 0}}, SeparationMode::QuasiHemiMetric)).valid());
  EXPECT_FALSE(
      validate_space(FiniteSpace::from_matrix({{0, 0}, {0, 0}}, SeparationMode::QuasiHemiMetric)).valid());
}

TEST(Validate, TriangleWitnessAndDefect) {
  const auto r = validate_space(FiniteSpace({"a", "b", "c"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}));
  ASSERT_TRUE(has_axiom(r, Axiom::Triangle));
  bool found = false;
  for (const auto& v : r.violations) {
    if (v.axiom == Axiom::Triangle && v.witness == std::vector<std::string>{"a", "b", "c"}) {
      EXPECT_DOUBLE_EQ(v.defect, 3.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Validate, DiagonalAndTolerance) {
  EXPECT_TRUE(has_axiom(validate_space(FiniteSpace::from_matrix({{1, 1}, {1, 0}})), Axiom::Diagonal));
  const auto nearly = FiniteSpace::from_matrix({{0, 1, 2.0000001}, {1, 0, 1}, {1, 1, 0}});
  EXPECT_FALSE(validate_space(nearly).valid());
  EXPECT_TRUE(validate_space(nearly, 1e-6).valid());
}

TEST(Validate, InfiniteDistancesAllowed) {
  const auto s = FiniteSpace::from_matrix({{0, oracle::inf}, {1, 0}});
  EXPECT_TRUE(validate_space(s).valid());
  EXPECT_EQ(index_of_symmetry(s).index, 0.0);
}

TEST(UpperDistance, Basics) {
  EXPECT_EQ(d_u(0, 3), 3);
  EXPECT_EQ(d_u(3, 0), 0);
  EXPECT_EQ(d_u(2.5, 2.5), 0);
}

TEST(Symmetrize, MaxPerPairAndMetricFixed) {
  const auto s = FiniteSpace::from_matrix({{0, 1}, {4, 0}});
  EXPECT_EQ(symmetrize(s).matrix(), (oracle::Matrix{{0, 4}, {4, 0}}));
  EXPECT_EQ(reverse(s).matrix(), (oracle::Matrix{{0, 4}, {1, 0}}));
  const auto metric = FiniteSpace::from_matrix({{0, 2, 3}, {2, 0, 1}, {3, 1, 0}});
  EXPECT_EQ(symmetrize(metric).matrix(), metric.matrix());
  EXPECT_THROW(symmetrize(FiniteSpace::from_matrix({{0, 0}, {1, 0}})), Error);
}

TEST(Index, TwoPointExample) {
  const auto r = index_of_symmetry(FiniteSpace::from_matrix({{0, 1}, {4, 0}}));
  EXPECT_DOUBLE_EQ(r.index, 0.25);
  EXPECT_TRUE(r.is_exact);
  EXPECT_EQ(r.evidence, SymmetryEvidence::Exact);
  // The witness orientation attains the ratio d(to, from) / d(from, to).
  const auto s = FiniteSpace::from_matrix({{0, 1}, {4, 0}});
  EXPECT_DOUBLE_EQ(s.d(s.index_of(r.witness_to), s.index_of(r.witness_from)) /
                       s.d(s.index_of(r.witness_from), s.index_of(r.witness_to)),
                   0.25);
}

TEST(Index, MetricIsOneAndDegenerateRejected) {
  EXPECT_DOUBLE_EQ(index_of_symmetry(FiniteSpace::from_matrix({{0, 2}, {2, 0}})).index, 1.0);
  try {
    index_of_symmetry(FiniteSpace::from_matrix({{0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateInput);
  }
}

TEST(Index, AnalyticLineDecaysLikeTheRatioFormula) {
  AnalyticSpace line(AnalyticSpace::Family::Example31, {}, {0, 1, 5, 6, 20, 21});
  const auto r = index_of_symmetry(line, {{0, 1}, {5, 6}, {20, 21}});
  ASSERT_EQ(r.ratios.size(), 3u);
  EXPECT_NEAR(r.ratios[0], oracle::symmetry_ratio(0), 1e-12);
  EXPECT_NEAR(r.ratios[1], oracle::symmetry_ratio(5), 1e-12);
  EXPECT_NEAR(r.ratios[2], oracle::symmetry_ratio(20), 1e-12);
  EXPECT_NEAR(r.ratios[0], 0.6466, 1e-4);
  EXPECT_NEAR(r.ratios[2], 0.00119, 1e-5);
  EXPECT_FALSE(r.is_exact);
  EXPECT_EQ(r.evidence, SymmetryEvidence::DecayingToZero);
}

TEST(Index, ConstantRandersCertifiedLower) {
  AnalyticSpace line(AnalyticSpace::Family::ConstantRanders1d, {0.5}, {0, 1});
  const auto r = index_of_symmetry(line, {{0, 1}});
  ASSERT_TRUE(r.certified_lower.has_value());
  EXPECT_NEAR(*r.certified_lower, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.index, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(AnalyticSpace(AnalyticSpace::Family::ConstantRanders1d, {1.0}, {0}), Error);
}

TEST(Decay, Classifier) {
  EXPECT_TRUE(is_decaying({0.6, 0.02, 0.001}));
  EXPECT_FALSE(is_decaying({0.6, 0.5, 0.4}));
  EXPECT_FALSE(is_decaying({0.6, 0.7, 0.001}));
  EXPECT_FALSE(is_decaying({0.6, 0.001}));
}

TEST(Slip, Examples) {
  const auto s = FiniteSpace({"a", "b", "c"}, {{0, 1, 2}, {3, 0, 1}, {1, 2, 0}});
  EXPECT_EQ(slip_constant(SampledFunction{{"a", 0}, {"b", 1}, {"c", 2}}, s), 1.0);
  EXPECT_EQ(slip_constant(SampledFunction{{"a", 7}, {"b", 7}, {"c", 7}}, s), 0.0);
  const auto hemi = FiniteSpace({"a", "b"}, {{0, 0}, {1, 0}}, SeparationMode::QuasiHemiMetric);
  EXPECT_TRUE(std::isinf(slip_constant(SampledFunction{{"a", 0}, {"b", 1}}, hemi)));
  try {
    slip_constant(SampledFunction{{"a", 0}}, hemi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedInput);
  }
}

TEST(Linearity, HemiTwoPointWitness) {
  const auto hemi = FiniteSpace({"a", "b"}, {{0, 0}, {1, 0}}, SeparationMode::QuasiHemiMetric);
  const auto v = slip0_linearity(hemi);
  EXPECT_FALSE(v.linear);
  EXPECT_EQ(v.index, 0.0);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(*v.witness, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(v.witness_slip, 1.0);
  EXPECT_TRUE(std::isinf(v.negation_slip));
  EXPECT_EQ(*v.witness_based, (std::vector<double>{0.0, -1.0}));
}

TEST(Linearity, QuasiMetricAndMetricAreLinear) {
  EXPECT_TRUE(slip0_linearity(FiniteSpace::from_matrix({{0, 1}, {4, 0}})).linear);
  EXPECT_TRUE(slip0_linearity(FiniteSpace::from_matrix({{0, 2, 3}, {2, 0, 1}, {3, 1, 0}})).linear);
}

TEST(RandomSpace, ValidAndHemiZerosPlanted) {
  std::mt19937_64 rng(5);
  int zeros = 0;
  for (int i = 0; i < 50; ++i) {
    const auto s = random_space(rng, 8, SeparationMode::QuasiHemiMetric, 0.3);
    ASSERT_TRUE(validate_space(s).valid());
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = 0; b < s.size(); ++b) zeros += a != b && s.d(a, b) == 0.0;
  }
  EXPECT_GT(zeros, 0);
}

TEST(Codec, SpaceJsonRoundTrip) {
  const auto s = FiniteSpace({"x", "y"}, {{0, 1}, {oracle::inf, 0}});
  const auto j = codec::space_to_json(s);
  const auto back = codec::space_from_json(j);
  EXPECT_EQ(back.ids(), s.ids());
  EXPECT_EQ(back.matrix(), s.matrix());
  EXPECT_THROW(codec::space_from_json(nlohmann::json{{"dist", "nope"}}), Error);
}

TEST(Codec, SpaceCsv) {
  std::istringstream in("a,b,c\n0,1,2\n1,0,inf\n2,1,0\n");
  const auto s = codec::space_from_csv(in);
  EXPECT_EQ(s.ids(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(std::isinf(s.d(1, 2)));
  std::istringstream bad("a,b\n0,1\n");
  EXPECT_THROW(codec::space_from_csv(bad), Error);
}
