#pragma once

#include <istream>
#include <string>

#include <nlohmann/json.hpp>

#include "finslerq/finsler.hpp"
#include "finslerq/quasimetric.hpp"
#include "finslerq/smooth_map.hpp"
#include "finslerq/types.hpp"

// JSON and CSV encodings of the core objects. Parse failures raise
// Error(MalformedInput) with the offending key in the message.
namespace finslerq::codec {

nlohmann::json vec_to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);
nlohmann::json mat_to_json(const Mat& m);
Mat mat_from_json(const nlohmann::json& j);

// Non-finite numbers are written as the strings "inf", "-inf", "nan".
nlohmann::json number(double x);
double number_from_json(const nlohmann::json& j);

// {"family": "euclidean" | "riemannian" | "randers" | "example31", "params": {...}}
// `dimension` is only used for euclidean fields without a params.dimension.
nlohmann::json field_to_json(const finsler::MinkowskiNormField& field);
finsler::MinkowskiNormField field_from_json(const nlohmann::json& j, int dimension = 1);

// Field keys plus "box": [[lo, hi], ...], "grid": [n, ...], "stencil": r.
nlohmann::json chart_to_json(const finsler::FinslerChart& chart);
finsler::FinslerChart chart_from_json(const nlohmann::json& j);

// {"family": "identity" | "translation" | "affine" | "tabulated-1d-monotone", ...}
nlohmann::json map_to_json(const isometry::SmoothMap& map);
isometry::SmoothMap map_from_json(const nlohmann::json& j);

// {"points": [...], "dist": [[...]], "mode": "quasi-metric" | "quasi-hemi-metric"}
quasimetric::FiniteSpace space_from_json(const nlohmann::json& j);
nlohmann::json space_to_json(const quasimetric::FiniteSpace& space);
// Header row of ids, then one matrix row per line. "inf" is accepted.
quasimetric::FiniteSpace space_from_csv(std::istream& in,
                                        quasimetric::SeparationMode mode =
                                            quasimetric::SeparationMode::QuasiMetric);

std::string to_string(quasimetric::SeparationMode mode);
quasimetric::SeparationMode separation_mode_from_string(const std::string& name);
std::string to_string(quasimetric::Axiom axiom);
std::string to_string(quasimetric::SymmetryEvidence evidence);

nlohmann::json to_json(const quasimetric::ValidationReport& report);
nlohmann::json to_json(const quasimetric::SymmetryReport& report);
nlohmann::json to_json(const finsler::DistanceRecord& record);
nlohmann::json to_json(const finsler::MinkowskiReport& report);

}  // namespace finslerq::codec
