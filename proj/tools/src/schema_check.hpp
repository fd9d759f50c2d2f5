#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace mixsmooth::cli {

/// Validator for the JSON-schema subset used by report.schema.json: type
/// (single or list), enum, required, properties, additionalProperties
/// (boolean), items, and local "#/$defs/..." references. Returns one
/// message per violation, each prefixed with a JSON pointer.
std::vector<std::string> validate(const nlohmann::json& schema, const nlohmann::ordered_json& doc);

/// The shipped report schema, compiled into the binary.
const nlohmann::json& report_schema();

}  // namespace mixsmooth::cli
