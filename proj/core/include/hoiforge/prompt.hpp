#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hoiforge/histogram.hpp"
#include "hoiforge/vocabulary.hpp"

namespace hoiforge {

using ConfigValue = std::variant<std::int64_t, double, std::string>;
using ModelConfig = std::vector<std::pair<std::string, ConfigValue>>;

/// Text prompt plus sampler knobs for an external text-to-image generator.
struct HoiPrompt {
  std::string positive_text;
  std::string negative_text;
  std::vector<CategoryId> triplet_ids;
  std::uint64_t seed = 0;
  ModelConfig model_config;

  friend bool operator==(const HoiPrompt&, const HoiPrompt&) = default;
};

/// Ranges the per-prompt generator configuration is drawn from.
struct ModelConfigSpace {
  double guidance_min = 5.0;
  double guidance_max = 9.0;
  std::vector<std::int64_t> steps = {25, 30, 40, 50};
  std::vector<std::string> samplers = {"ddim", "dpm++_2m", "euler_a"};
};

struct PromptOptions {
  std::size_t negative_count = 5;
  /// Cap on triplets (person clauses) per prompt.
  std::size_t max_triplets = 2;
  ModelConfigSpace config_space;
};

/// "a" or "an" for a noun, by its first letter.
std::string_view indefinite_article(std::string_view noun);

/// One person clause: "a {race} {age_gender} {verb_ing} a/an {object}".
std::string person_clause(const TripletEntry& triplet, std::string_view race, std::string_view age_gender);

/// Builds the prompt for `triplets`. The result is a pure function of the
/// arguments; draws happen in the order race, age_gender, environment,
/// quality, lighting, view, camera, negatives, model config.
HoiPrompt compose_prompt(const std::vector<CategoryId>& triplets, const TripletVocabulary& vocab,
                         const AttributeVocabulary& attrs, std::uint64_t seed, const PromptOptions& options = {});

/// Recovers triplet ids from a composed positive text, or nullopt if the text
/// does not follow the clause grammar over the given vocabularies.
std::optional<std::vector<CategoryId>> parse_prompt(std::string_view positive_text, const TripletVocabulary& vocab,
                                                    const AttributeVocabulary& attrs);

/// `anchor` followed by up to k-1 distinct partners drawn without replacement,
/// each with probability proportional to its co-occurrence count with `anchor`.
std::vector<CategoryId> sample_cooccurring(const CoOccurrenceTable& table, CategoryId anchor, std::size_t k,
                                           std::uint64_t seed);

/// retention of generated images that survive automatic filtering: 146,772 / 259,806.
inline constexpr double kDefaultRetentionRate = 146772.0 / 259806.0;

struct GenerationPlan {
  std::vector<std::int64_t> per_category;
  double retention_rate = kDefaultRetentionRate;

  std::int64_t total_prompts() const;
};

/// Smallest per-category prompt counts such that hist[c] + count * retention >= target_min.
GenerationPlan build_generation_plan(const CategoryHistogram& hist, std::int64_t target_min,
                                     double retention_rate = kDefaultRetentionRate);

/// Expands a plan into prompts. Category c's j-th prompt uses a seed derived
/// from (seed, c, j), so any prompt can be regenerated on its own.
std::vector<HoiPrompt> generate_prompts(const GenerationPlan& plan, const TripletVocabulary& vocab,
                                        const AttributeVocabulary& attrs, const CoOccurrenceTable& table,
                                        std::uint64_t seed, const PromptOptions& options = {});

/// One JSON line with fixed field order: seed, triplet_ids, positive_text, negative_text, model_config.
std::string prompt_to_json_line(const HoiPrompt& prompt);

}  // namespace hoiforge
