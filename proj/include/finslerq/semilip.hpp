#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "finslerq/finsler.hpp"
#include "finslerq/scalar_field.hpp"
#include "finslerq/types.hpp"

namespace finslerq::semilip {

using finsler::DistanceMethod;
using finsler::FinslerChart;
using finsler::MinkowskiNormField;
using finsler::PointPair;

/// sup{ <g, v> : F(x, v) = 1 }.
///
/// In 1-D this is the two-endpoint formula max{g v+, g v-} with
/// v+ = 1/F(x,1) and v- = -1/F(x,-1). In 2-D and 3-D the forward unit sphere
/// is sampled along 256 directions (uniform angles, resp. a Fibonacci
/// lattice) and the best sample is polished by Brent ascent in the angle
/// coordinates; the result is never below the best sample.
/// Throws InvalidStructure when F(x, .) is not a Minkowski norm.
double dual_asym_norm(const MinkowskiNormField& field, const Vec& x, const Vec& g);

/// Closed-form dual of a Randers norm sqrt(v^T A v) + <b, v>:
///   (sqrt((1 - |b|^2) |g|^2 + <g, b>^2) - <g, b>) / (1 - |b|^2)
/// with all norms and pairings taken in A^{-1}.
double randers_dual_norm(const MinkowskiNormField& field, const Vec& x, const Vec& g);

/// ||df(x)|_F.
double derivative_asym_norm(const FinslerChart& chart, const ScalarField& f, const Vec& x);

struct DerivativeNormProfile {
  std::vector<Vec> xs;
  std::vector<double> values;  // ||df(x)|_F per sample
  double supremum = 0.0;       // +infinity when diverges
  bool diverges = false;
  Vec argmax;
};

/// Divergence: some nondecreasing run of at least three consecutive samples
/// ends above `cap`, or a sample is infinite.
bool is_diverging(const std::vector<double>& values, double cap = kDivergenceCap);

DerivativeNormProfile sup_derivative_norm(const FinslerChart& chart, const ScalarField& f,
                                          const std::vector<Vec>& xs, double cap = kDivergenceCap);

struct SlipEstimate {
  double value = 0.0;  // +infinity for an increase across a zero-distance pair
  Vec from;
  Vec to;
};

/// max over pairs of max{f(q) - f(p), 0} / d(p, q).
SlipEstimate empirical_slip(const FinslerChart& chart, const ScalarField& f,
                            const std::vector<PointPair>& pairs,
                            DistanceMethod method = DistanceMethod::Auto);

struct SlipEqualityReport {
  double s1 = 0.0;  // empirical slip constant over the pairs
  double s2 = 0.0;  // sampled derivative supremum
  bool s2_diverges = false;
  double tol = 0.0;
  // Largest jump of ||df|_F between consecutive derivative samples: the
  // resolution at which a sampled supremum can miss the true one.
  double coverage_slack = 0.0;
  bool pass = false;
  SlipEstimate s1_witness;
  Vec s2_argmax;
};

/// pass iff s1 <= s2 (1 + tol) and s2 <= s1 (1 + tol) + coverage_slack.
SlipEqualityReport verify_slip_equals_derivative_sup(const FinslerChart& chart,
                                                     const ScalarField& f,
                                                     const std::vector<Vec>& xs,
                                                     const std::vector<PointPair>& pairs, double tol,
                                                     DistanceMethod method = DistanceMethod::Auto);

/// Semi-Lipschitz constant of a function sampled on an increasing 1-D grid,
/// from adjacent pairs in both directions. On a 1-D chart distances are
/// additive along the line, so this equals the all-pairs supremum.
SlipEstimate slip_on_line(const FinslerChart& chart, const std::vector<double>& grid,
                          const std::vector<double>& values);

struct SmoothingResult {
  explicit SmoothingResult(ScalarField field) : g(std::move(field)) {}

  ScalarField g;
  bool unchanged = false;  // input was already C^1 and accepted as is
  double width = 0.0;      // mollifier half-width (0 when unchanged)
  int attempts = 0;
  double max_deviation = 0.0;  // max |g - f| on the verification grid
  double worst_x = 0.0;
  double slip_f = 0.0;
  double slip_g = 0.0;  // max of pair-based and derivative-based estimates
  std::vector<double> grid;
};

/// C^1 approximation g of a 1-D semi-Lipschitz f with |g - f| <= eps(x) and
/// slip(g) <= slip(f) + r on the verification grid (the table refined four
/// times, inside the chart). C^1 inputs are returned unchanged when they
/// satisfy both clauses; tabulated inputs are mollified with a halving width
/// schedule. Throws ApproximationFailed when no width passes.
SmoothingResult smooth_approximate_1d(const FinslerChart& chart, const ScalarField& f,
                                      const std::function<double(double)>& eps, double r);

struct Example34Entry {
  std::string name;
  double classical = 0.0;  // sup |f'(x)|
  double finsler = 0.0;    // sup over x of max |f'(x) v| on F(x, v) <= 1
  bool finsler_diverges = false;
  double ratio = 0.0;  // finsler / classical (inf when diverging, 0 for 0/0)
  bool lower_holds = true;        // classical <= 2 finsler
  bool stated_upper_holds = true;  // finsler <= 2 classical
};

struct Example34Report {
  std::vector<Example34Entry> entries;
  bool lower_holds_all = true;
};

/// Norm comparison on the one-dimensional index-0 chart. The stated upper
/// bound is recorded, not asserted.
Example34Report example34_ratio_experiment(
    const std::vector<std::pair<std::string, ScalarField>>& fields, const std::vector<double>& xs);

}  // namespace finslerq::semilip
