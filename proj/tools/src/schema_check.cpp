#include "schema_check.hpp"

#include "report_schema_text.hpp"

namespace mixsmooth::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool has_type(const ordered_json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (t == "number") return v.is_number();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

void check(const json& root, const json& s, const ordered_json& v, const std::string& at,
           std::vector<std::string>& errors) {
  if (s.contains("$ref")) {
    const auto ref = s["$ref"].get<std::string>();
    if (ref.rfind("#/", 0) != 0) {
      errors.push_back(at + ": unsupported $ref " + ref);
      return;
    }
    check(root, root.at(json::json_pointer(ref.substr(1))), v, at, errors);
    return;
  }
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
    } else {
      ok = has_type(v, s["type"].get<std::string>());
    }
    if (!ok) {
      errors.push_back(at + ": expected type " + s["type"].dump());
      return;
    }
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || ordered_json(e) == v;
    if (!found) errors.push_back(at + ": value " + v.dump() + " not in enum");
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s["required"])
        if (!v.contains(r.get<std::string>())) errors.push_back(at + ": missing " + r.get<std::string>());
    const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
    for (const auto& [key, val] : v.items()) {
      if (s.contains("properties") && s["properties"].contains(key))
        check(root, s["properties"][key], val, at + "/" + key, errors);
      else if (closed)
        errors.push_back(at + ": unexpected property " + key);
    }
  }
  if (v.is_array() && s.contains("items"))
    for (std::size_t i = 0; i < v.size(); ++i) check(root, s["items"], v[i], at + "/" + std::to_string(i), errors);
}

}  // namespace

std::vector<std::string> validate(const json& schema, const ordered_json& doc) {
  std::vector<std::string> errors;
  check(schema, schema, doc, "", errors);
  return errors;
}

const json& report_schema() {
  static const json schema = json::parse(kReportSchemaText);
  return schema;
}

}  // namespace mixsmooth::cli
