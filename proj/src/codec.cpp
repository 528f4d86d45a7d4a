#include "finslerq/codec.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "finslerq/errors.hpp"

namespace finslerq::codec {

using nlohmann::json;
using finsler::MinkowskiNormField;
using isometry::SmoothMap;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::MalformedInput, std::string("missing key \"") + key + "\"");
  }
  return j.at(key);
}

}  // namespace

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::MalformedInput, "expected a number, got " + j.dump());
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Vec vec_from_json(const json& j) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array()) throw Error(ErrorKind::MalformedInput, "expected a vector, got " + j.dump());
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from_json(j[i]);
  return v;
}

json mat_to_json(const Mat& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(vec_to_json(m.row(i).transpose()));
  return out;
}

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::MalformedInput, "expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vec row = vec_from_json(j[static_cast<std::size_t>(i)]);
    if (row.size() != cols) throw Error(ErrorKind::MalformedInput, "ragged matrix");
    m.row(i) = row.transpose();
  }
  return m;
}

json field_to_json(const MinkowskiNormField& field) {
  json out{{"family", finsler::to_string(field.family())}};
  switch (field.family()) {
    case MinkowskiNormField::Family::Euclidean:
      out["params"] = {{"dimension", field.dimension()}};
      break;
    case MinkowskiNormField::Family::Riemannian:
      out["params"] = {{"metric", mat_to_json(field.metric())}};
      break;
    case MinkowskiNormField::Family::Randers: {
      json params{{"metric", mat_to_json(field.metric())}, {"drift", vec_to_json(field.drift_offset())}};
      if (field.drift_gradient().size() != 0) params["drift_gradient"] = mat_to_json(field.drift_gradient());
      out["params"] = params;
      break;
    }
    case MinkowskiNormField::Family::Example31:
      out["params"] = json::object();
      break;
  }
  return out;
}

MinkowskiNormField field_from_json(const json& j, int dimension) {
  const auto family = require(j, "family").get<std::string>();
  const json params = j.value("params", json::object());
  if (family == "euclidean") return MinkowskiNormField::euclidean(params.value("dimension", dimension));
  if (family == "example31") return MinkowskiNormField::example31();
  if (family == "riemannian") return MinkowskiNormField::riemannian(mat_from_json(require(params, "metric")));
  if (family == "randers") {
    Vec drift = vec_from_json(require(params, "drift"));
    const Mat metric = params.contains("metric") ? mat_from_json(params.at("metric"))
                                                  : Mat::Identity(drift.size(), drift.size());
    const Mat gradient = params.contains("drift_gradient") ? mat_from_json(params.at("drift_gradient")) : Mat();
    return MinkowskiNormField::randers(metric, std::move(drift), gradient);
  }
  throw Error(ErrorKind::MalformedInput, "unknown norm-field family " + family);
}

json chart_to_json(const finsler::FinslerChart& chart) {
  json out = field_to_json(chart.field());
  json box = json::array();
  for (int i = 0; i < chart.dimension(); ++i) box.push_back({chart.box().lo[i], chart.box().hi[i]});
  out["box"] = box;
  out["grid"] = chart.grid();
  out["stencil"] = chart.stencil();
  return out;
}

finsler::FinslerChart chart_from_json(const json& j) {
  const auto& box_json = require(j, "box");
  if (!box_json.is_array() || box_json.empty()) throw Error(ErrorKind::MalformedInput, "box must be a list");
  const int n = static_cast<int>(box_json.size());
  finsler::Box box{Vec(n), Vec(n)};
  for (int i = 0; i < n; ++i) {
    const auto& side = box_json[static_cast<std::size_t>(i)];
    if (!side.is_array() || side.size() != 2) throw Error(ErrorKind::MalformedInput, "box entries are [lo, hi]");
    box.lo[i] = number_from_json(side[0]);
    box.hi[i] = number_from_json(side[1]);
  }
  std::vector<int> grid;
  if (j.contains("grid")) {
    grid = j.at("grid").get<std::vector<int>>();
  } else if (j.contains("step")) {
    const double step = j.at("step").get<double>();
    if (!(step > 0.0)) throw Error(ErrorKind::MalformedInput, "step must be positive");
    for (int i = 0; i < n; ++i) {
      grid.push_back(static_cast<int>(std::ceil((box.hi[i] - box.lo[i]) / step - 1e-9)) + 1);
    }
  } else {
    throw Error(ErrorKind::MalformedInput, "chart needs \"grid\" or \"step\"");
  }
  return {box, field_from_json(j, n), grid, j.value("stencil", 0)};
}

json map_to_json(const SmoothMap& map) {
  json out{{"family", isometry::to_string(map.family())}};
  switch (map.family()) {
    case SmoothMap::Family::Identity:
      out["params"] = {{"dimension", map.dimension()}};
      break;
    case SmoothMap::Family::Translation:
      out["params"] = {{"offset", vec_to_json(map.offset())}};
      break;
    case SmoothMap::Family::Affine:
      out["params"] = {{"matrix", mat_to_json(map.matrix())}, {"offset", vec_to_json(map.offset())}};
      break;
    case SmoothMap::Family::TabulatedMonotone1d:
      out["xs"] = map.table_xs();
      out["ys"] = map.table_ys();
      break;
  }
  if (map.is_inverted()) out["inverted"] = true;
  return out;
}

SmoothMap map_from_json(const json& j) {
  const auto family = require(j, "family").get<std::string>();
  const json params = j.value("params", json::object());
  SmoothMap map = [&] {
    if (family == "identity") return SmoothMap::identity(params.value("dimension", 1));
    if (family == "translation") return SmoothMap::translation(vec_from_json(require(params, "offset")));
    if (family == "affine") {
      const Mat matrix = mat_from_json(require(params, "matrix"));
      const Vec offset = params.contains("offset") ? vec_from_json(params.at("offset"))
                                                   : Vec::Zero(matrix.rows());
      return SmoothMap::affine(matrix, offset);
    }
    if (family == "tabulated-1d-monotone") {
      return SmoothMap::tabulated_monotone_1d(require(j, "xs").get<std::vector<double>>(),
                                              require(j, "ys").get<std::vector<double>>());
    }
    throw Error(ErrorKind::MalformedInput, "unknown map family " + family);
  }();
  return j.value("inverted", false) ? map.inverted() : map;
}

std::string to_string(quasimetric::SeparationMode mode) {
  return mode == quasimetric::SeparationMode::QuasiMetric ? "quasi-metric" : "quasi-hemi-metric";
}

quasimetric::SeparationMode separation_mode_from_string(const std::string& name) {
  if (name == "quasi-metric") return quasimetric::SeparationMode::QuasiMetric;
  if (name == "quasi-hemi-metric" || name == "hemi") return quasimetric::SeparationMode::QuasiHemiMetric;
  throw Error(ErrorKind::MalformedInput, "unknown separation mode " + name);
}

std::string to_string(quasimetric::Axiom axiom) {
  switch (axiom) {
    case quasimetric::Axiom::Diagonal: return "diagonal";
    case quasimetric::Axiom::Triangle: return "triangle";
    case quasimetric::Axiom::Separation: return "separation";
  }
  return "unknown";
}

std::string to_string(quasimetric::SymmetryEvidence evidence) {
  switch (evidence) {
    case quasimetric::SymmetryEvidence::Exact: return "exact";
    case quasimetric::SymmetryEvidence::UpperEstimate: return "upper-estimate";
    case quasimetric::SymmetryEvidence::DecayingToZero: return "decaying-to-zero";
  }
  return "unknown";
}

quasimetric::FiniteSpace space_from_json(const json& j) {
  const auto& dist = require(j, "dist");
  if (!dist.is_array()) throw Error(ErrorKind::MalformedInput, "dist must be a matrix");
  std::vector<std::vector<double>> matrix;
  for (const auto& row : dist) {
    if (!row.is_array()) throw Error(ErrorKind::MalformedInput, "dist rows must be lists");
    std::vector<double> values;
    for (const auto& x : row) values.push_back(number_from_json(x));
    matrix.push_back(std::move(values));
  }
  const auto mode = separation_mode_from_string(j.value("mode", std::string("quasi-metric")));
  if (!j.contains("points")) return quasimetric::FiniteSpace::from_matrix(matrix, mode);
  std::vector<std::string> ids;
  for (const auto& p : j.at("points")) ids.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  return {ids, matrix, mode};
}

json space_to_json(const quasimetric::FiniteSpace& space) {
  json dist = json::array();
  for (const auto& row : space.matrix()) {
    json r = json::array();
    for (double x : row) r.push_back(number(x));
    dist.push_back(r);
  }
  return {{"points", space.ids()}, {"dist", dist}, {"mode", to_string(space.mode())}};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  return cells;
}

}  // namespace

quasimetric::FiniteSpace space_from_csv(std::istream& in, quasimetric::SeparationMode mode) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MalformedInput, "empty CSV");
  const auto ids = split_csv_line(line);
  std::vector<std::vector<double>> matrix;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const auto& cell : split_csv_line(line)) {
      if (cell == "inf" || cell == "+inf") {
        row.push_back(kInf);
        continue;
      }
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::MalformedInput, "bad CSV number \"" + cell + "\"");
      }
    }
    matrix.push_back(std::move(row));
  }
  return {ids, matrix, mode};
}

json to_json(const quasimetric::ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"axiom", to_string(v.axiom)}, {"witness", v.witness}, {"defect", number(v.defect)}});
  }
  return {{"valid", report.valid()}, {"violations", violations}};
}

json to_json(const quasimetric::SymmetryReport& report) {
  json out{{"index", number(report.index)},
           {"is_exact", report.is_exact},
           {"evidence", to_string(report.evidence)}};
  if (!report.witness_from.empty()) out["witness"] = {report.witness_from, report.witness_to};
  if (report.witness_from_point.size() > 0) {
    out["witness"] = {vec_to_json(report.witness_from_point), vec_to_json(report.witness_to_point)};
  }
  if (!report.ratios.empty()) {
    json ratios = json::array();
    for (double r : report.ratios) ratios.push_back(number(r));
    out["ratios"] = ratios;
  }
  if (report.certified_lower) out["certified_lower"] = *report.certified_lower;
  return out;
}

json to_json(const finsler::DistanceRecord& record) {
  return {{"x", vec_to_json(record.x)},
          {"y", vec_to_json(record.y)},
          {"value", number(record.value)},
          {"method", record.method},
          {"error_estimate", number(record.error_estimate)}};
}

json to_json(const finsler::MinkowskiReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"check", v.check},
                          {"x", vec_to_json(v.x)},
                          {"v", vec_to_json(v.v)},
                          {"magnitude", number(v.magnitude)}});
  }
  return {{"valid", report.valid()}, {"violations", violations}, {"notes", report.notes}};
}

}  // namespace finslerq::codec
