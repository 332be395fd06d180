#include "json_util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hoiforge::detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

json parse_json(std::string_view text, std::string_view where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    throw SchemaError(std::string(where) + ": line " + std::to_string(line) + ": " + e.what());
  }
}

const json& require(const json& obj, const char* field, std::string_view where) {
  if (!obj.is_object()) throw SchemaError(std::string(where) + ": expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) throw SchemaError(std::string(where) + ": missing field '" + field + "'");
  return *it;
}

}  // namespace hoiforge::detail
