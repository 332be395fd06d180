#pragma once

// Private helpers for schema-checked JSON reading.

#include <filesystem>
#include <string>
#include <string_view>

#include "hoiforge/error.hpp"
#include "json.hpp"

namespace hoiforge::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Parses `text`; syntax errors become SchemaError naming `where` and the line.
json parse_json(std::string_view text, std::string_view where);

/// Required member of `obj`; SchemaError naming `where` and the field otherwise.
const json& require(const json& obj, const char* field, std::string_view where);

template <typename T>
T get_as(const json& obj, const char* field, std::string_view where) {
  const json& v = require(obj, field, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string(where) + ": field '" + field + "' has wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* field, T fallback, std::string_view where) {
  if (!obj.is_object() || !obj.contains(field) || obj.at(field).is_null()) return fallback;
  return get_as<T>(obj, field, where);
}

}  // namespace hoiforge::detail
