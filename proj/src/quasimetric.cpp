#include "finslerq/quasimetric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "finslerq/errors.hpp"

namespace finslerq::quasimetric {

FiniteSpace::FiniteSpace(std::vector<std::string> ids,
                         const std::vector<std::vector<double>>& matrix, SeparationMode mode)
    : ids_(std::move(ids)), mode_(mode) {
  const std::size_t n = ids_.size();
  if (matrix.size() != n) {
    throw Error(ErrorKind::MalformedInput, "distance matrix has " +
                                               std::to_string(matrix.size()) + " rows for " +
                                               std::to_string(n) + " points");
  }
  dist_.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) {
      throw Error(ErrorKind::MalformedInput,
                  "distance matrix is not square (row " + std::to_string(i) + ")");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double v = matrix[i][j];
      if (std::isnan(v) || v < 0.0) {
        throw Error(ErrorKind::MalformedInput, "negative or NaN distance at (" + ids_[i] +
                                                   ", " + ids_[j] + ")");
      }
      dist_.push_back(v);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ids_[i] == ids_[j]) throw Error(ErrorKind::MalformedInput, "duplicate id " + ids_[i]);
    }
  }
}

FiniteSpace FiniteSpace::from_matrix(const std::vector<std::vector<double>>& matrix,
                                     SeparationMode mode) {
  std::vector<std::string> ids;
  ids.reserve(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) ids.push_back("p" + std::to_string(i));
  return FiniteSpace(std::move(ids), matrix, mode);
}

std::size_t FiniteSpace::index_of(const std::string& id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw Error(ErrorKind::MalformedInput, "unknown point id " + id);
  return static_cast<std::size_t>(it - ids_.begin());
}

std::vector<std::vector<double>> FiniteSpace::matrix() const {
  const std::size_t n = size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = d(i, j);
  return out;
}

ValidationReport validate_space(const FiniteSpace& space, double relative_tolerance) {
  ValidationReport report;
  const std::size_t n = space.size();
  const auto& ids = space.ids();

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::isfinite(space.d(i, j))) scale = std::max(scale, space.d(i, j));
  const double tol = relative_tolerance * scale;

  for (std::size_t i = 0; i < n; ++i) {
    if (space.d(i, i) > tol) {
      report.violations.push_back({Axiom::Diagonal, {ids[i]}, space.d(i, i)});
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        const double via = space.d(a, b) + space.d(b, c);
        const double direct = space.d(a, c);
        if (!std::isfinite(direct) && !std::isfinite(via)) continue;
        const double defect = direct - via;
        if (defect > tol) {
          report.violations.push_back({Axiom::Triangle, {ids[a], ids[b], ids[c]}, defect});
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool zero_ij = space.d(i, j) <= tol;
      if (space.mode() == SeparationMode::QuasiMetric) {
        if (zero_ij) report.violations.push_back({Axiom::Separation, {ids[i], ids[j]}, 0.0});
      } else if (i < j && zero_ij && space.d(j, i) <= tol) {
        report.violations.push_back({Axiom::Separation, {ids[i], ids[j]}, 0.0});
      }
    }
  }
  return report;
}

double d_u(double x, double y) noexcept { return std::max(y - x, 0.0); }

namespace {

void require_valid(const FiniteSpace& space) {
  const auto report = validate_space(space);
  if (!report.valid()) {
    throw Error(ErrorKind::InvalidStructure,
                "space violates " + std::to_string(report.violations.size()) + " axiom check(s)");
  }
}

}  // namespace

FiniteSpace symmetrize(const FiniteSpace& space) {
  require_valid(space);
  auto m = space.matrix();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) m[i][j] = std::max(space.d(i, j), space.d(j, i));
  return FiniteSpace(space.ids(), m, SeparationMode::QuasiMetric);
}

FiniteSpace reverse(const FiniteSpace& space) {
  require_valid(space);
  auto m = space.matrix();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) m[i][j] = space.d(j, i);
  return FiniteSpace(space.ids(), m, space.mode());
}

SymmetryReport index_of_symmetry(const FiniteSpace& space) {
  if (space.size() < 2) {
    throw Error(ErrorKind::DegenerateInput, "index of symmetry needs at least two points");
  }
  SymmetryReport report;
  report.is_exact = true;
  report.evidence = SymmetryEvidence::Exact;
  report.index = 1.0;
  bool have_witness = false;
  const auto& ids = space.ids();
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = 0; y < space.size(); ++y) {
      if (x == y) continue;
      const double forward = space.d(x, y);
      if (!(forward > 0.0)) continue;
      // Infinite distance forces index 0.
      const double ratio = std::isinf(forward) ? 0.0 : space.d(y, x) / forward;
      if (!have_witness || ratio < report.index) {
        report.index = std::min(ratio, 1.0);
        report.witness_from = ids[x];
        report.witness_to = ids[y];
        have_witness = true;
      }
    }
  }
  if (report.index > 0.0) report.certified_lower = report.index;
  return report;
}

bool is_decaying(const std::vector<double>& ratios) {
  if (ratios.size() < 3) return false;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    if (!(ratios[i] < ratios[i - 1])) return false;
  }
  return ratios.back() <= 1e-2 * ratios.front();
}

std::vector<double> align(const SampledFunction& f, const FiniteSpace& space) {
  std::vector<double> values;
  values.reserve(space.size());
  for (const auto& id : space.ids()) {
    const auto it = f.find(id);
    if (it == f.end()) throw Error(ErrorKind::MalformedInput, "function undefined at " + id);
    values.push_back(it->second);
  }
  return values;
}

double slip_constant(const std::vector<double>& values, const FiniteSpace& space) {
  if (values.size() != space.size()) {
    throw Error(ErrorKind::MalformedInput, "function must be defined on every point");
  }
  double best = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = 0; y < space.size(); ++y) {
      if (x == y) continue;
      const double rise = values[y] - values[x];
      if (!(rise > 0.0)) continue;
      const double dist = space.d(x, y);
      if (dist == 0.0) return kInf;
      best = std::max(best, rise / dist);
    }
  }
  return best;
}

double slip_constant(const SampledFunction& f, const FiniteSpace& space) {
  return slip_constant(align(f, space), space);
}

LinearityVerdict slip0_linearity(const FiniteSpace& space) {
  require_valid(space);
  LinearityVerdict verdict;
  verdict.index = space.size() >= 2 ? index_of_symmetry(space).index : 1.0;

  const std::size_t n = space.size();
  for (int truncated = 0; truncated < 2; ++truncated) {
    for (std::size_t p = 0; p < n; ++p) {
      std::vector<double> f(n);
      bool finite = true;
      for (std::size_t q = 0; q < n; ++q) {
        f[q] = truncated ? std::min(space.d(p, q), 1.0) : space.d(p, q);
        finite = finite && std::isfinite(f[q]);
      }
      if (!finite) continue;
      const double slip = slip_constant(f, space);
      if (!std::isfinite(slip)) continue;
      std::vector<double> neg(n);
      for (std::size_t q = 0; q < n; ++q) neg[q] = -f[q];
      const double neg_slip = slip_constant(neg, space);
      if (std::isfinite(neg_slip)) continue;

      verdict.linear = false;
      verdict.witness_slip = slip;
      verdict.negation_slip = neg_slip;
      std::vector<double> based(n);
      for (std::size_t q = 0; q < n; ++q) based[q] = f[q] - f[0];
      verdict.witness = std::move(f);
      verdict.witness_based = std::move(based);
      return verdict;
    }
  }
  return verdict;
}

AnalyticSpace::AnalyticSpace(Family family, std::vector<double> params,
                             std::vector<double> samples)
    : family_(family), params_(std::move(params)), samples_(std::move(samples)) {
  if (family_ == Family::ConstantRanders1d) {
    if (params_.size() != 1 || !(std::abs(params_[0]) < 1.0)) {
      throw Error(ErrorKind::InvalidStructure, "constant Randers drift must satisfy |beta| < 1");
    }
  }
  if (samples_.empty()) throw Error(ErrorKind::DegenerateInput, "analytic space needs samples");
}

SeparationMode AnalyticSpace::mode() const noexcept {
  return family_ == Family::UpperReal ? SeparationMode::QuasiHemiMetric
                                      : SeparationMode::QuasiMetric;
}

double AnalyticSpace::distance(double x, double y) const {
  switch (family_) {
    case Family::Example31:
      if (y >= x) return std::atan(y) - std::atan(x);
      return 2.0 * (x - y) - (std::atan(x) - std::atan(y));
    case Family::UpperReal:
      return d_u(x, y);
    case Family::ConstantRanders1d: {
      const double beta = params_[0];
      return y >= x ? (1.0 + beta) * (y - x) : (1.0 - beta) * (x - y);
    }
    case Family::Euclidean1d:
      return std::abs(y - x);
  }
  return 0.0;
}

FiniteSpace AnalyticSpace::sample() const {
  const std::size_t n = samples_.size();
  std::vector<std::string> ids;
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream label;
    label.precision(17);
    label << samples_[i];
    ids.push_back(label.str());
    for (std::size_t j = 0; j < n; ++j) m[i][j] = i == j ? 0.0 : distance(samples_[i], samples_[j]);
  }
  return FiniteSpace(std::move(ids), m, mode());
}

ValidationReport validate_space(const AnalyticSpace& space) {
  return validate_space(space.sample(), 1e-9);
}

SymmetryReport index_of_symmetry(const AnalyticSpace& space,
                                 const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw Error(ErrorKind::DegenerateInput, "index estimate needs sample pairs");
  SymmetryReport report;
  report.is_exact = false;
  report.index = 1.0;
  bool have_witness = false;
  for (const auto& [x, y] : pairs) {
    const double forward = space.distance(x, y);
    const double backward = space.distance(y, x);
    double ratio = 1.0;
    double from = x;
    double to = y;
    if (forward > 0.0 && backward / forward <= 1.0) {
      ratio = backward / forward;
    } else if (backward > 0.0) {
      ratio = forward / backward;
      std::swap(from, to);
    }
    report.ratios.push_back(ratio);
    if (!have_witness || ratio < report.index) {
      report.index = ratio;
      report.witness_from_point = Vec::Constant(1, from);
      report.witness_to_point = Vec::Constant(1, to);
      report.witness_from = std::to_string(from);
      report.witness_to = std::to_string(to);
      have_witness = true;
    }
  }
  report.evidence =
      is_decaying(report.ratios) ? SymmetryEvidence::DecayingToZero : SymmetryEvidence::UpperEstimate;
  switch (space.family()) {
    case AnalyticSpace::Family::Euclidean1d:
      report.certified_lower = 1.0;
      break;
    case AnalyticSpace::Family::ConstantRanders1d: {
      const double beta = std::abs(space.params()[0]);
      report.certified_lower = (1.0 - beta) / (1.0 + beta);
      break;
    }
    default:
      break;
  }
  return report;
}

FiniteSpace random_space(std::mt19937_64& rng, std::size_t points, SeparationMode mode,
                         double zero_probability) {
  if (points < 1) throw Error(ErrorKind::DegenerateInput, "random space needs points");
  std::uniform_int_distribution<int> weight(1, 20);
  std::bernoulli_distribution zero(mode == SeparationMode::QuasiHemiMetric ? zero_probability
                                                                            : 0.0);
  const std::size_t n = points;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    // Zeros only point "upward" in a random order, so no zero cycle can form.
    std::vector<std::size_t> rank(n);
    std::iota(rank.begin(), rank.end(), 0);
    std::shuffle(rank.begin(), rank.end(), rng);
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          const bool planted = zero(rng) && rank[i] < rank[j];
          m[i][j] = planted ? 0.0 : static_cast<double>(weight(rng));
        }
    // Shortest-path closure; integer-valued so every sum is exact.
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = std::min(m[i][j], m[i][k] + m[k][j]);
    FiniteSpace space = FiniteSpace::from_matrix(m, mode);
    if (validate_space(space).valid()) return space;
  }
  throw Error(ErrorKind::Internal, "could not generate a valid random space");
}

}  // namespace finslerq::quasimetric
