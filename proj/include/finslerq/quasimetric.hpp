#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "finslerq/types.hpp"

namespace finslerq::quasimetric {

enum class SeparationMode {
  QuasiMetric,      // d(x,y) = 0 implies x = y
  QuasiHemiMetric,  // d(x,y) = d(y,x) = 0 implies x = y
};

/// Finite point set with a row-major asymmetric distance matrix.
///
/// Construction rejects non-square, negative or NaN matrices. Axiom checks
/// (diagonal, triangle, separation) are left to validate_space so that
/// invalid spaces can still be inspected. Entries may be +infinity.
class FiniteSpace {
 public:
  FiniteSpace(std::vector<std::string> ids, const std::vector<std::vector<double>>& matrix,
              SeparationMode mode = SeparationMode::QuasiMetric);

  /// Points are labelled p0, p1, ...
  static FiniteSpace from_matrix(const std::vector<std::vector<double>>& matrix,
                                 SeparationMode mode = SeparationMode::QuasiMetric);

  std::size_t size() const noexcept { return ids_.size(); }
  double d(std::size_t from, std::size_t to) const { return dist_[from * ids_.size() + to]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  SeparationMode mode() const noexcept { return mode_; }
  std::size_t index_of(const std::string& id) const;
  std::vector<std::vector<double>> matrix() const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> dist_;
  SeparationMode mode_;
};

/// Real-valued function on a finite space, keyed by point id.
using SampledFunction = std::map<std::string, double>;

enum class Axiom { Diagonal, Triangle, Separation };

struct Violation {
  Axiom axiom;
  // Witness points; third entry only used for triangle violations.
  std::vector<std::string> witness;
  double defect = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const noexcept { return violations.empty(); }
};

/// Exact axiom check when tolerance is 0; otherwise defects up to
/// tolerance * (largest finite distance) are ignored.
ValidationReport validate_space(const FiniteSpace& space, double relative_tolerance = 0.0);

/// max{y - x, 0}: the usual quasi-metric on the real line.
double d_u(double x, double y) noexcept;

FiniteSpace symmetrize(const FiniteSpace& space);
FiniteSpace reverse(const FiniteSpace& space);

enum class SymmetryEvidence {
  Exact,           // minimum over a finite space
  UpperEstimate,   // infimum over sampled pairs only
  DecayingToZero,  // sampled ratios decrease strictly toward zero
};

struct SymmetryReport {
  double index = 1.0;
  std::string witness_from;
  std::string witness_to;
  Vec witness_from_point;  // empty for finite spaces
  Vec witness_to_point;
  bool is_exact = false;
  SymmetryEvidence evidence = SymmetryEvidence::UpperEstimate;
  // Per sampled pair, in sample order: min of the two orientation ratios.
  std::vector<double> ratios;
  // Positive lower bound on the true index when one is known in closed form.
  std::optional<double> certified_lower;
};

/// Exact index of symmetry of a finite space (>= 2 points).
SymmetryReport index_of_symmetry(const FiniteSpace& space);

/// Classifies a sequence of sampled ratios: strictly decreasing over at least
/// three samples with the last one at most 1e-2 times the first.
bool is_decaying(const std::vector<double>& ratios);

/// Semi-Lipschitz constant of f w.r.t. d_u on the target; +infinity when a
/// zero-distance pair carries an increase.
double slip_constant(const std::vector<double>& values, const FiniteSpace& space);
double slip_constant(const SampledFunction& f, const FiniteSpace& space);

std::vector<double> align(const SampledFunction& f, const FiniteSpace& space);

struct LinearityVerdict {
  bool linear = true;
  double index = 1.0;
  // Distance-generated function with finite slip whose negation has infinite slip.
  std::optional<std::vector<double>> witness;
  // The same witness shifted to vanish at the base point (first point).
  std::optional<std::vector<double>> witness_based;
  double witness_slip = 0.0;
  double negation_slip = 0.0;
};

/// Brute-force search for a non-linearity witness of SLIP_0 among the
/// functions d(p, .) and min{d(p, .), 1}; verdict is linear iff none exists.
LinearityVerdict slip0_linearity(const FiniteSpace& space);

/// Analytic quasi-metric families on the real line sampled into finite spaces.
class AnalyticSpace {
 public:
  enum class Family { Example31, UpperReal, ConstantRanders1d, Euclidean1d };

  AnalyticSpace(Family family, std::vector<double> params, std::vector<double> samples);

  double distance(double x, double y) const;
  FiniteSpace sample() const;
  Family family() const noexcept { return family_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  const std::vector<double>& params() const noexcept { return params_; }
  SeparationMode mode() const noexcept;

 private:
  Family family_;
  std::vector<double> params_;
  std::vector<double> samples_;
};

ValidationReport validate_space(const AnalyticSpace& space);

/// Upper estimate of the index from sampled pairs; never exact.
SymmetryReport index_of_symmetry(const AnalyticSpace& space,
                                 const std::vector<std::pair<double, double>>& pairs);

/// Random valid finite space with integer distances (exact arithmetic).
/// Hemi mode plants zero distances in one direction with the given probability.
FiniteSpace random_space(std::mt19937_64& rng, std::size_t points, SeparationMode mode,
                         double zero_probability = 0.0);

}  // namespace finslerq::quasimetric
