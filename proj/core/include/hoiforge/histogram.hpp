#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hoiforge {

enum class CountUnit { kImages, kInstances };

std::string_view to_string(CountUnit unit);
CountUnit parse_count_unit(std::string_view text);

/// Per-HOI-category counts; length equals the vocabulary's K2.
struct CategoryHistogram {
  std::vector<std::int64_t> counts;
  CountUnit unit = CountUnit::kInstances;

  std::size_t size() const { return counts.size(); }
  std::int64_t operator[](std::size_t c) const { return counts[c]; }
  std::int64_t total() const;

  /// Throws ValidationError on a negative entry.
  void validate() const;

  friend bool operator==(const CategoryHistogram&, const CategoryHistogram&) = default;
};

CategoryHistogram parse_histogram(std::string_view json_text);
CategoryHistogram load_histogram(const std::filesystem::path& path);
std::string histogram_to_json(const CategoryHistogram& hist);

}  // namespace hoiforge
