#include "hoiforge/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "hoiforge/error.hpp"
#include "hoiforge/rng.hpp"
#include "json_util.hpp"

namespace hoiforge {

namespace {

const std::string& pick(Rng& rng, const std::vector<std::string>& list) { return list[rng.below(list.size())]; }

constexpr std::string_view kClauseJoiner = " and ";
constexpr std::string_view kSlotJoiner = ", ";

}  // namespace

std::string_view indefinite_article(std::string_view noun) {
  if (noun.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(noun.front()))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return "an";
    default:
      return "a";
  }
}

std::string person_clause(const TripletEntry& triplet, std::string_view race, std::string_view age_gender) {
  std::string s = "a ";
  s.append(race).append(" ").append(age_gender).append(" ").append(triplet.verb_ing).append(" ");
  s.append(indefinite_article(triplet.object)).append(" ").append(triplet.object);
  return s;
}

HoiPrompt compose_prompt(const std::vector<CategoryId>& triplets, const TripletVocabulary& vocab,
                         const AttributeVocabulary& attrs, std::uint64_t seed, const PromptOptions& options) {
  if (triplets.empty()) throw ArgumentError("compose_prompt: no triplets");
  for (CategoryId id : triplets) vocab.at(id);
  attrs.validate();

  Rng rng(seed);
  const auto& race = pick(rng, attrs.race);
  const auto& age_gender = pick(rng, attrs.age_gender);
  const auto& environment = pick(rng, attrs.environment);
  const auto& quality = pick(rng, attrs.quality);
  const auto& lighting = pick(rng, attrs.lighting);
  const auto& view = pick(rng, attrs.view);
  const auto& camera = pick(rng, attrs.camera);

  HoiPrompt p;
  p.seed = seed;
  p.triplet_ids = triplets;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    if (i > 0) p.positive_text.append(kClauseJoiner);
    p.positive_text.append(person_clause(vocab.at(triplets[i]), race, age_gender));
  }
  for (const std::string* slot : {&environment, &quality, &lighting, &view, &camera}) {
    p.positive_text.append(kSlotJoiner).append(*slot);
  }

  // Partial Fisher-Yates; negatives keep their draw order.
  std::vector<std::size_t> order(attrs.negative.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n_neg = std::min(options.negative_count, order.size());
  for (std::size_t i = 0; i < n_neg; ++i) {
    const std::size_t j = i + rng.below(order.size() - i);
    std::swap(order[i], order[j]);
    if (i > 0) p.negative_text.append(kSlotJoiner);
    p.negative_text.append(attrs.negative[order[i]]);
  }

  const auto& space = options.config_space;
  const double guidance = std::round(rng.uniform(space.guidance_min, space.guidance_max) * 100.0) / 100.0;
  p.model_config.emplace_back("guidance_scale", guidance);
  if (!space.steps.empty()) {
    p.model_config.emplace_back("steps", space.steps[rng.below(space.steps.size())]);
  }
  if (!space.samplers.empty()) {
    p.model_config.emplace_back("sampler", space.samplers[rng.below(space.samplers.size())]);
  }
  p.model_config.emplace_back("generator_seed", static_cast<std::int64_t>(rng.next() >> 1));
  return p;
}

namespace {

// Backtracking recognizer for the positive-text grammar:
//   prompt  := clause (" and " clause)* ", " env ", " quality ", " lighting ", " view ", " camera
//   clause  := "a " race " " age_gender " " verb_ing " " article " " object
class PromptParser {
 public:
  PromptParser(std::string_view text, const TripletVocabulary& vocab, const AttributeVocabulary& attrs)
      : text_(text), vocab_(vocab), attrs_(attrs) {}

  std::optional<std::vector<CategoryId>> run() {
    if (clauses(0)) return ids_;
    return std::nullopt;
  }

 private:
  bool eat(std::size_t pos, std::string_view lit, std::size_t& out) const {
    if (text_.substr(pos).starts_with(lit)) {
      out = pos + lit.size();
      return true;
    }
    return false;
  }

  bool clauses(std::size_t pos) {
    std::size_t p0 = 0;
    if (!eat(pos, "a ", p0)) return false;
    for (const auto& race : attrs_.race) {
      std::size_t p1 = 0, p2 = 0;
      if (!eat(p0, race, p1) || !eat(p1, " ", p1)) continue;
      for (const auto& ag : attrs_.age_gender) {
        if (!eat(p1, ag, p2) || !eat(p2, " ", p2)) continue;
        for (const auto& e : vocab_.entries()) {
          std::size_t p3 = 0;
          if (!eat(p2, e.verb_ing, p3) || !eat(p3, " ", p3) || !eat(p3, indefinite_article(e.object), p3) ||
              !eat(p3, " ", p3) || !eat(p3, e.object, p3)) {
            continue;
          }
          ids_.push_back(e.hoi_id);
          std::size_t p4 = 0;
          if (eat(p3, kClauseJoiner, p4) && clauses(p4)) return true;
          if (eat(p3, kSlotJoiner, p4) && tail(p4, 0)) return true;
          ids_.pop_back();
        }
      }
    }
    return false;
  }

  bool tail(std::size_t pos, int slot) {
    const std::vector<std::string>* slots[] = {&attrs_.environment, &attrs_.quality, &attrs_.lighting, &attrs_.view,
                                               &attrs_.camera};
    for (const auto& value : *slots[slot]) {
      std::size_t p = 0;
      if (!eat(pos, value, p)) continue;
      if (slot == 4) {
        if (p == text_.size()) return true;
        continue;
      }
      if (eat(p, kSlotJoiner, p) && tail(p, slot + 1)) return true;
    }
    return false;
  }

  std::string_view text_;
  const TripletVocabulary& vocab_;
  const AttributeVocabulary& attrs_;
  std::vector<CategoryId> ids_;
};

}  // namespace

std::optional<std::vector<CategoryId>> parse_prompt(std::string_view positive_text, const TripletVocabulary& vocab,
                                                    const AttributeVocabulary& attrs) {
  return PromptParser(positive_text, vocab, attrs).run();
}

std::vector<CategoryId> sample_cooccurring(const CoOccurrenceTable& table, CategoryId anchor, std::size_t k,
                                           std::uint64_t seed) {
  if (k == 0) throw ArgumentError("sample_cooccurring: k must be positive");
  if (anchor < 0) throw ArgumentError("sample_cooccurring: invalid anchor " + std::to_string(anchor));
  std::vector<CategoryId> out{anchor};
  auto partners = table.partners(anchor);
  Rng rng(seed);
  while (out.size() < k && !partners.empty()) {
    std::uint64_t total = 0;
    for (const auto& [id, count] : partners) total += count;
    std::uint64_t r = rng.below(total);
    auto it = partners.begin();
    for (; it != partners.end(); ++it) {
      if (r < it->second) break;
      r -= it->second;
    }
    out.push_back(it->first);
    partners.erase(it);
  }
  return out;
}

std::int64_t GenerationPlan::total_prompts() const {
  return std::accumulate(per_category.begin(), per_category.end(), std::int64_t{0});
}

GenerationPlan build_generation_plan(const CategoryHistogram& hist, std::int64_t target_min, double retention_rate) {
  if (!(retention_rate > 0.0) || retention_rate > 1.0) {
    throw ArgumentError("retention_rate must be in (0, 1]");
  }
  if (target_min <= 0) throw ArgumentError("target_min must be positive");
  hist.validate();
  GenerationPlan plan;
  plan.retention_rate = retention_rate;
  plan.per_category.reserve(hist.size());
  for (std::int64_t have : hist.counts) {
    const std::int64_t deficit = std::max<std::int64_t>(0, target_min - have);
    auto count = static_cast<std::int64_t>(std::ceil(static_cast<double>(deficit) / retention_rate));
    // ceil() over a rounded quotient can land one off in either direction.
    while (static_cast<double>(count) * retention_rate < static_cast<double>(deficit)) ++count;
    while (count > 0 && static_cast<double>(count - 1) * retention_rate >= static_cast<double>(deficit)) --count;
    plan.per_category.push_back(count);
  }
  return plan;
}

std::vector<HoiPrompt> generate_prompts(const GenerationPlan& plan, const TripletVocabulary& vocab,
                                        const AttributeVocabulary& attrs, const CoOccurrenceTable& table,
                                        std::uint64_t seed, const PromptOptions& options) {
  if (plan.per_category.size() != static_cast<std::size_t>(vocab.num_categories())) {
    throw ValidationError("generation plan length does not match the vocabulary");
  }
  if (options.max_triplets == 0) throw ArgumentError("max_triplets must be positive");
  std::vector<HoiPrompt> out;
  out.reserve(static_cast<std::size_t>(plan.total_prompts()));
  for (std::size_t c = 0; c < plan.per_category.size(); ++c) {
    for (std::int64_t j = 0; j < plan.per_category[c]; ++j) {
      const std::uint64_t s = derive_seed(seed, c, static_cast<std::uint64_t>(j));
      auto ids = sample_cooccurring(table, static_cast<CategoryId>(c), options.max_triplets, mix_seed(s));
      out.push_back(compose_prompt(ids, vocab, attrs, s, options));
    }
  }
  return out;
}

std::string prompt_to_json_line(const HoiPrompt& prompt) {
  detail::ordered_json j;
  j["seed"] = prompt.seed;
  j["triplet_ids"] = prompt.triplet_ids;
  j["positive_text"] = prompt.positive_text;
  j["negative_text"] = prompt.negative_text;
  detail::ordered_json cfg = detail::ordered_json::object();
  for (const auto& [key, value] : prompt.model_config) {
    std::visit([&](const auto& v) { cfg[key] = v; }, value);
  }
  j["model_config"] = std::move(cfg);
  return j.dump();
}

}  // namespace hoiforge
