#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hoiforge {

using CategoryId = int;
using ObjectClassId = int;

struct TripletEntry {
  CategoryId hoi_id = 0;
  std::string verb;
  std::string verb_ing;  // stored participle, e.g. "riding"
  std::string object;
  ObjectClassId object_id = 0;
};

/// The HOI category list: K2 (verb, object) triplets over K1 object classes.
class TripletVocabulary {
 public:
  TripletVocabulary() = default;

  /// Validates and sorts by hoi_id. `object_classes` defaults to max(object_id) + 1.
  explicit TripletVocabulary(std::vector<TripletEntry> entries, std::optional<int> object_classes = std::nullopt);

  int num_categories() const { return static_cast<int>(entries_.size()); }
  int num_object_classes() const { return object_classes_; }

  const std::vector<TripletEntry>& entries() const { return entries_; }
  const TripletEntry& at(CategoryId id) const;
  bool contains(CategoryId id) const { return id >= 0 && id < num_categories(); }
  ObjectClassId object_of(CategoryId id) const { return at(id).object_id; }

  std::optional<CategoryId> find(std::string_view verb, std::string_view object) const;

  /// Distinct verbs in first-appearance order of ascending hoi_id.
  std::vector<std::string> verbs() const;
  /// Distinct object class ids, ascending.
  std::vector<ObjectClassId> object_ids() const;

 private:
  std::vector<TripletEntry> entries_;
  int object_classes_ = 0;
};

TripletVocabulary parse_vocabulary(std::string_view json_text);
TripletVocabulary load_vocabulary(const std::filesystem::path& path);

/// Candidate strings for every prompt slot.
struct AttributeVocabulary {
  std::vector<std::string> race;
  std::vector<std::string> age_gender;
  std::vector<std::string> environment;
  std::vector<std::string> quality;
  std::vector<std::string> lighting;
  std::vector<std::string> view;
  std::vector<std::string> camera;
  std::vector<std::string> negative;

  /// Throws ValidationError on an empty list or a blank entry.
  void validate() const;
};

AttributeVocabulary parse_attributes(std::string_view json_text);
AttributeVocabulary load_attributes(const std::filesystem::path& path);

/// Symmetric co-occurrence counts between HOI categories.
class CoOccurrenceTable {
 public:
  /// Sets counts(a,b) and counts(b,a).
  void set(CategoryId a, CategoryId b, std::uint64_t count);
  /// Adds to counts(a,b) and counts(b,a) (once when a == b).
  void add(CategoryId a, CategoryId b, std::uint64_t count);
  std::uint64_t count(CategoryId a, CategoryId b) const;

  /// Partners b != anchor with count > 0, ascending by id.
  std::vector<std::pair<CategoryId, std::uint64_t>> partners(CategoryId anchor) const;

  bool empty() const { return counts_.empty(); }

 private:
  std::map<std::pair<CategoryId, CategoryId>, std::uint64_t> counts_;
};

CoOccurrenceTable parse_cooccurrence(std::string_view json_text);
CoOccurrenceTable load_cooccurrence(const std::filesystem::path& path);

}  // namespace hoiforge
