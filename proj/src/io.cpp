#include "formspace/io.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace formspace::io {

using nlohmann::json;

namespace {

std::string kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::one_form:
      return "one-form";
    case FieldKind::metric:
      return "metric";
    case FieldKind::rotation:
      return "rotation";
  }
  return "one-form";
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + key + ": missing");
  return j.at(key);
}

Eigen::Index positive_int(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(where + key + ": expected a positive integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

void check_version(const json& j) {
  if (!j.is_object()) throw ParseError("document: expected a JSON object");
  if (j.contains("version")) {
    const json& v = j.at("version");
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
      throw ParseError("version: unsupported format version (expected " +
                       std::to_string(kFormatVersion) + ")");
    }
  }
}

Matrix parse_row_major(const json& v, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  if (!v.is_array()) throw ParseError(name + ": expected an array of numbers");
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) {
    throw ParseError(name + ": expected " + std::to_string(rows * cols) + " numbers, got " +
                     std::to_string(v.size()));
  }
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const json& x = v.at(static_cast<std::size_t>(i * cols + j));
      if (!x.is_number()) throw ParseError(name + ": entry " + std::to_string(i * cols + j) + " is not a number");
      a(i, j) = x.get<double>();
    }
  }
  if (!a.allFinite()) throw ParseError(name + ": entries must be finite");
  return a;
}

json row_major(const Matrix& a) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) arr.push_back(a(i, j));
  }
  return arr;
}

}  // namespace

Eigen::Index FieldFile::record_rows() const { return kind == FieldKind::metric ? m : n; }

Eigen::Index FieldFile::record_cols() const {
  switch (kind) {
    case FieldKind::one_form:
      return m;
    case FieldKind::metric:
      return m;
    case FieldKind::rotation:
      return n;
  }
  return m;
}

ManifoldPtr FieldFile::manifold() const {
  return std::make_shared<const SampledManifold>(point_ids, weights, n, m);
}

FieldFile parse_field(const json& j) {
  check_version(j);
  FieldFile f;
  if (j.contains("kind")) {
    const json& k = j.at("kind");
    const std::string s = k.is_string() ? k.get<std::string>() : "";
    if (s == "one-form") {
      f.kind = FieldKind::one_form;
    } else if (s == "metric") {
      f.kind = FieldKind::metric;
    } else if (s == "rotation") {
      f.kind = FieldKind::rotation;
    } else {
      throw ParseError("kind: expected \"one-form\", \"metric\" or \"rotation\"");
    }
  }
  f.n = positive_int(j, "n", "");
  f.m = positive_int(j, "m", "");
  if (f.n <= f.m) throw ParseError("n: must be greater than m");
  const json& records = require(j, "records", "");
  if (!records.is_array() || records.empty()) throw ParseError("records: expected a non-empty array");

  std::set<std::string> seen;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const std::string where = "records[" + std::to_string(k) + "].";
    const json& r = records[k];
    if (!r.is_object()) throw ParseError("records[" + std::to_string(k) + "]: expected an object");
    const json& id = require(r, "point_id", where);
    if (!id.is_string()) throw ParseError(where + "point_id: expected a string");
    const std::string pid = id.get<std::string>();
    if (!seen.insert(pid).second) throw ParseError(where + "point_id: duplicate id '" + pid + "'");
    const json& w = require(r, "weight", where);
    if (!w.is_number() || !(w.get<double>() > 0.0) || !std::isfinite(w.get<double>())) {
      throw ParseError(where + "weight: expected a positive number");
    }
    f.point_ids.push_back(pid);
    f.weights.push_back(w.get<double>());
    f.matrices.push_back(
        parse_row_major(require(r, "matrix", where), f.record_rows(), f.record_cols(), where + "matrix"));
  }
  if (j.contains("metadata")) {
    if (!j.at("metadata").is_object()) throw ParseError("metadata: expected an object");
    f.metadata = j.at("metadata");
  }
  return f;
}

json to_json(const FieldFile& f) {
  json j;
  j["format"] = "formspace-field";
  j["version"] = kFormatVersion;
  j["kind"] = kind_name(f.kind);
  j["n"] = f.n;
  j["m"] = f.m;
  json records = json::array();
  for (std::size_t k = 0; k < f.matrices.size(); ++k) {
    records.push_back({{"point_id", f.point_ids[k]}, {"weight", f.weights[k]}, {"matrix", row_major(f.matrices[k])}});
  }
  j["records"] = std::move(records);
  j["metadata"] = f.metadata;
  return j;
}

Matrix parse_matrix(const json& j) {
  check_version(j);
  if (j.contains("records")) {
    const FieldFile f = parse_field(j);
    if (f.matrices.size() != 1) throw ParseError("records: expected exactly one record for a matrix input");
    return f.matrices.front();
  }
  const Eigen::Index rows = positive_int(j, "rows", "");
  const Eigen::Index cols = positive_int(j, "cols", "");
  return parse_row_major(require(j, "matrix", ""), rows, cols, "matrix");
}

json matrix_to_json(const Matrix& a) {
  json j;
  j["format"] = "formspace-matrix";
  j["version"] = kFormatVersion;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  j["matrix"] = row_major(a);
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot write file");
  out << j.dump(2) << '\n';
}

FieldFile read_field_file(const std::filesystem::path& path) { return parse_field(read_json(path)); }

void write_field_file(const std::filesystem::path& path, const FieldFile& f) { write_json(path, to_json(f)); }

Matrix read_matrix_file(const std::filesystem::path& path) { return parse_matrix(read_json(path)); }

namespace {

template <typename Value>
FieldFile field_file_from(const Field<Value>& field, FieldKind kind) {
  FieldFile f;
  f.kind = kind;
  f.n = field.manifold->n();
  f.m = field.manifold->m();
  f.point_ids = field.manifold->ids();
  f.weights = field.manifold->weights();
  for (const Value& v : field.values) f.matrices.push_back(v.matrix());
  return f;
}

}  // namespace

FieldFile make_field_file(const OneFormField& field) { return field_file_from(field, FieldKind::one_form); }
FieldFile make_field_file(const MetricField& field) { return field_file_from(field, FieldKind::metric); }
FieldFile make_field_file(const RotationField& field) { return field_file_from(field, FieldKind::rotation); }

}  // namespace formspace::io
