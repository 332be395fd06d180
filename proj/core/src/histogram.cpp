#include "hoiforge/histogram.hpp"

#include <numeric>

#include "json_util.hpp"

namespace hoiforge {

std::string_view to_string(CountUnit unit) { return unit == CountUnit::kImages ? "images" : "instances"; }

CountUnit parse_count_unit(std::string_view text) {
  if (text == "images") return CountUnit::kImages;
  if (text == "instances") return CountUnit::kInstances;
  throw ArgumentError("unknown histogram unit '" + std::string(text) + "' (expected images|instances)");
}

std::int64_t CategoryHistogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

void CategoryHistogram::validate() const {
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 0) throw ValidationError("histogram entry " + std::to_string(c) + " is negative");
  }
}

CategoryHistogram parse_histogram(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "histogram");
  CategoryHistogram h;
  try {
    h.unit = parse_count_unit(detail::get_as<std::string>(doc, "unit", "histogram"));
  } catch (const ArgumentError& e) {
    throw SchemaError(std::string("histogram: ") + e.what());
  }
  h.counts = detail::get_as<std::vector<std::int64_t>>(doc, "counts", "histogram");
  h.validate();
  return h;
}

CategoryHistogram load_histogram(const std::filesystem::path& path) {
  return parse_histogram(detail::read_text_file(path));
}

std::string histogram_to_json(const CategoryHistogram& hist) {
  detail::ordered_json j;
  j["unit"] = to_string(hist.unit);
  j["counts"] = hist.counts;
  return j.dump();
}

}  // namespace hoiforge
