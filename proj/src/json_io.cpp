#include "ocbf/json_io.hpp"

#include "ocbf/errors.hpp"

namespace ocbf::json_io {

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

json vector_to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back(complex_to_json(v(j)));
  return out;
}

json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("field '" + where + "': expected a number");
  return j.get<double>();
}

Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError("field '" + where + "': expected a [re, im] pair");
  }
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

CVector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("field '" + where + "': expected an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t n = 0; n < j.size(); ++n) {
    v(n) = complex_from_json(j[n], where + "[" + std::to_string(n) + "]");
  }
  return v;
}

CMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("field '" + where + "': expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  CMatrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    const CVector row = vector_from_json(j[r], rw);
    if (row.size() != rows) throw ParseError("field '" + rw + "': row length mismatch");
    m.row(r) = row.transpose();
  }
  return m;
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError("missing field '" + (where.empty() ? key : where + "." + key) + "'");
  }
  return obj.at(key);
}

std::vector<double> number_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("field '" + where + "': expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t n = 0; n < j.size(); ++n) {
    out.push_back(number(j[n], where + "[" + std::to_string(n) + "]"));
  }
  return out;
}

}  // namespace ocbf::json_io
