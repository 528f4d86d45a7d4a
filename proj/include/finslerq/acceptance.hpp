#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace finslerq::acceptance {

/// Largest grid step at which the 1-D distance criteria are meaningful.
inline constexpr double kMaxGridStep = 0.01;

struct Options {
  // Relative perturbation applied to every closed-form reference value.
  // Nonzero values exist to check that the suite notices a wrong oracle.
  double oracle_perturbation = 0.0;
  double grid_step = kMaxGridStep;
  std::uint64_t seed = 20240607;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json data;
};

CriterionResult run_criterion(int id, const Options& options);
std::vector<CriterionResult> run_all(const Options& options);

/// "[PASS] 3 slip-equals-derivative-sup (0.41 s): ..." style line.
std::string summary_line(const CriterionResult& result);

nlohmann::json to_json(const CriterionResult& result);

}  // namespace finslerq::acceptance
