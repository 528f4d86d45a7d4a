#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Config-driven experiment runner shared by the CLI and the Python module.
namespace finslerq::experiments {

inline constexpr const char* kToolName = "finslerq";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20240607;
inline constexpr double kDefaultTol = 1e-3;

/// Plot-ready table, written as CSV next to the JSON record.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

struct Result {
  nlohmann::json record;
  std::vector<Table> tables;
  bool pass = true;
};

/// validate, distance, slip, index, dual-gap, isometry, example31, example34,
/// linearity, verify.
const std::vector<std::string>& experiment_ids();

/// Runs config["experiment-id"]. Missing keys fall back to the documented
/// defaults; "seed" and "tol" are resolved before the inputs digest is taken.
/// Raises Error(Usage) for unknown ids and Error(MalformedInput) for bad specs.
Result run(const nlohmann::json& config);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

std::string to_csv(const Table& table);

}  // namespace finslerq::experiments
