#pragma once

// JSON helpers shared by the scenario and solution file formats. Complex
// numbers are stored as [re, im] pairs.

#include <string>

#include <json.hpp>

#include "ocbf/hermitian.hpp"

namespace ocbf::json_io {

using nlohmann::json;

json complex_to_json(Complex c);
json vector_to_json(const CVector& v);
json matrix_to_json(const CMatrix& m);

/// `where` names the field for error messages.
Complex complex_from_json(const json& j, const std::string& where);
CVector vector_from_json(const json& j, const std::string& where);
CMatrix matrix_from_json(const json& j, const std::string& where);

const json& require(const json& obj, const std::string& key, const std::string& where = "");
double number(const json& j, const std::string& where);
std::vector<double> number_array(const json& j, const std::string& where);

}  // namespace ocbf::json_io
