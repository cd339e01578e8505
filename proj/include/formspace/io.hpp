#pragma once

// JSON file formats.
//
// Field file (one record per sample point, matrices row-major):
//
//   {"format": "formspace-field", "version": 1, "kind": "one-form",
//    "n": 3, "m": 2,
//    "records": [{"point_id": "p0", "weight": 0.5, "matrix": [6 numbers]}, ...],
//    "metadata": {...}}
//
// `kind` selects the matrix shape of each record: "one-form" (n x m),
// "metric" (m x m) or "rotation" (n x n). A missing kind means "one-form".
//
// Matrix file: {"format": "formspace-matrix", "version": 1, "rows": 2,
// "cols": 1, "matrix": [1, 0]}. A field file with exactly one record is
// also accepted wherever a matrix file is expected.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "formspace/field_space.hpp"

namespace formspace::io {

inline constexpr int kFormatVersion = 1;

/// Malformed input; the message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

enum class FieldKind { one_form, metric, rotation };

struct FieldFile {
  FieldKind kind = FieldKind::one_form;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::vector<std::string> point_ids;
  std::vector<double> weights;
  std::vector<Matrix> matrices;
  nlohmann::json metadata = nlohmann::json::object();

  Eigen::Index record_rows() const;
  Eigen::Index record_cols() const;
  ManifoldPtr manifold() const;
};

FieldFile parse_field(const nlohmann::json& j);
nlohmann::json to_json(const FieldFile& f);

/// Parses a matrix file or a single-record field file.
Matrix parse_matrix(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& a);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

FieldFile read_field_file(const std::filesystem::path& path);
void write_field_file(const std::filesystem::path& path, const FieldFile& f);
Matrix read_matrix_file(const std::filesystem::path& path);

/// Field file for a one-form / metric / rotation field on `manifold`.
FieldFile make_field_file(const OneFormField& field);
FieldFile make_field_file(const MetricField& field);
FieldFile make_field_file(const RotationField& field);

}  // namespace formspace::io
