#include "hoiforge/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "json_util.hpp"

namespace hoiforge {

using detail::get_as;
using detail::json;

TripletVocabulary::TripletVocabulary(std::vector<TripletEntry> entries, std::optional<int> object_classes)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const TripletEntry& a, const TripletEntry& b) { return a.hoi_id < b.hoi_id; });
  std::set<std::pair<std::string, std::string>> pairs;
  int max_object = -1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.hoi_id != static_cast<int>(i)) {
      if (i > 0 && entries_[i - 1].hoi_id == e.hoi_id) {
        throw ValidationError("duplicate hoi_id " + std::to_string(e.hoi_id));
      }
      throw ValidationError("hoi_id values must be exactly 0.." + std::to_string(entries_.size() - 1) +
                            "; found " + std::to_string(e.hoi_id));
    }
    if (e.object_id < 0) throw ValidationError("negative object_id for hoi_id " + std::to_string(e.hoi_id));
    if (e.verb.empty() || e.verb_ing.empty() || e.object.empty()) {
      throw ValidationError("empty verb/object text for hoi_id " + std::to_string(e.hoi_id));
    }
    if (!pairs.emplace(e.verb, e.object).second) {
      throw ValidationError("duplicate (verb, object) pair (" + e.verb + ", " + e.object + ")");
    }
    max_object = std::max(max_object, e.object_id);
  }
  object_classes_ = object_classes.value_or(max_object + 1);
  if (object_classes_ <= max_object) {
    throw ValidationError("object_id " + std::to_string(max_object) + " exceeds object class count " +
                          std::to_string(object_classes_));
  }
}

const TripletEntry& TripletVocabulary::at(CategoryId id) const {
  if (!contains(id)) throw LookupError("unknown hoi_id " + std::to_string(id));
  return entries_[static_cast<std::size_t>(id)];
}

std::optional<CategoryId> TripletVocabulary::find(std::string_view verb, std::string_view object) const {
  for (const auto& e : entries_) {
    if (e.verb == verb && e.object == object) return e.hoi_id;
  }
  return std::nullopt;
}

std::vector<std::string> TripletVocabulary::verbs() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (seen.insert(e.verb).second) out.push_back(e.verb);
  }
  return out;
}

std::vector<ObjectClassId> TripletVocabulary::object_ids() const {
  std::set<ObjectClassId> ids;
  for (const auto& e : entries_) ids.insert(e.object_id);
  return {ids.begin(), ids.end()};
}

TripletVocabulary parse_vocabulary(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "vocabulary");
  if (!doc.is_array()) throw SchemaError("vocabulary: expected a JSON array");
  std::vector<TripletEntry> entries;
  entries.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "vocabulary entry " + std::to_string(i);
    const json& item = doc[i];
    TripletEntry e;
    e.hoi_id = get_as<int>(item, "hoi_id", where);
    e.verb = get_as<std::string>(item, "verb", where);
    e.verb_ing = get_as<std::string>(item, "verb_ing", where);
    e.object = get_as<std::string>(item, "object", where);
    e.object_id = get_as<int>(item, "object_id", where);
    entries.push_back(std::move(e));
  }
  return TripletVocabulary(std::move(entries));
}

TripletVocabulary load_vocabulary(const std::filesystem::path& path) {
  return parse_vocabulary(detail::read_text_file(path));
}

void AttributeVocabulary::validate() const {
  const std::pair<const char*, const std::vector<std::string>*> slots[] = {
      {"race", &race},   {"age_gender", &age_gender}, {"environment", &environment}, {"quality", &quality},
      {"lighting", &lighting}, {"view", &view},       {"camera", &camera},           {"negative", &negative}};
  for (const auto& [name, list] : slots) {
    if (list->empty()) throw ValidationError(std::string("attribute slot '") + name + "' is empty");
    for (const auto& s : *list) {
      if (s.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ValidationError(std::string("attribute slot '") + name + "' has a blank entry");
      }
    }
  }
}

AttributeVocabulary parse_attributes(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "attributes");
  const std::string where = "attributes";
  using List = std::vector<std::string>;
  AttributeVocabulary a;
  a.race = get_as<List>(doc, "race", where);
  a.age_gender = get_as<List>(doc, "age_gender", where);
  a.environment = get_as<List>(doc, "environment", where);
  a.quality = get_as<List>(doc, "quality", where);
  a.lighting = get_as<List>(doc, "lighting", where);
  a.view = get_as<List>(doc, "view", where);
  a.camera = get_as<List>(doc, "camera", where);
  a.negative = get_as<List>(doc, "negative", where);
  a.validate();
  return a;
}

AttributeVocabulary load_attributes(const std::filesystem::path& path) {
  return parse_attributes(detail::read_text_file(path));
}

void CoOccurrenceTable::set(CategoryId a, CategoryId b, std::uint64_t count) {
  counts_[{a, b}] = count;
  counts_[{b, a}] = count;
}

void CoOccurrenceTable::add(CategoryId a, CategoryId b, std::uint64_t count) {
  counts_[{a, b}] += count;
  if (a != b) counts_[{b, a}] += count;
}

std::uint64_t CoOccurrenceTable::count(CategoryId a, CategoryId b) const {
  auto it = counts_.find({a, b});
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<CategoryId, std::uint64_t>> CoOccurrenceTable::partners(CategoryId anchor) const {
  std::vector<std::pair<CategoryId, std::uint64_t>> out;
  for (auto it = counts_.lower_bound({anchor, INT32_MIN}); it != counts_.end() && it->first.first == anchor; ++it) {
    if (it->first.second != anchor && it->second > 0) out.emplace_back(it->first.second, it->second);
  }
  return out;
}

CoOccurrenceTable parse_cooccurrence(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "co-occurrence");
  if (!doc.is_array()) throw SchemaError("co-occurrence: expected a JSON array");
  CoOccurrenceTable table;
  // (a,b) and (b,a) may both be listed; they must agree.
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "co-occurrence entry " + std::to_string(i);
    const auto a = get_as<int>(doc[i], "a", where);
    const auto b = get_as<int>(doc[i], "b", where);
    const auto c = get_as<std::int64_t>(doc[i], "count", where);
    if (c < 0) throw ValidationError(where + ": negative count");
    const auto key = std::minmax(a, b);
    if (!seen.insert(key).second) {
      if (table.count(a, b) != static_cast<std::uint64_t>(c)) {
        throw ValidationError(where + ": conflicting count for pair (" + std::to_string(a) + ", " +
                              std::to_string(b) + ")");
      }
      continue;
    }
    table.set(a, b, static_cast<std::uint64_t>(c));
  }
  return table;
}

CoOccurrenceTable load_cooccurrence(const std::filesystem::path& path) {
  return parse_cooccurrence(detail::read_text_file(path));
}

}  // namespace hoiforge
