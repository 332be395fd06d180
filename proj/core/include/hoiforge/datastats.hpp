#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hoiforge/histogram.hpp"
#include "hoiforge/manifest.hpp"
#include "hoiforge/vocabulary.hpp"

namespace hoiforge {

/// Per-category counts over a manifest. kInstances counts annotations;
/// kImages counts distinct images holding at least one annotation of the category.
CategoryHistogram histogram(const std::vector<AnnotatedImage>& manifest, int num_categories, CountUnit unit);

/// Corpus totals. Boxes are counted once per distinct box per image.
struct DatasetTotals {
  std::int64_t images = 0;
  std::int64_t person_boxes = 0;
  std::int64_t object_boxes = 0;
  std::int64_t triplets = 0;
};

DatasetTotals dataset_totals(const std::vector<AnnotatedImage>& manifest);

struct TailReport {
  std::int64_t count_below = 0;
  /// Ascending by count, then by id.
  std::vector<CategoryId> categories;
};

/// Categories with counts[c] < threshold.
TailReport tail_report(const CategoryHistogram& hist, std::int64_t threshold);

/// Element-wise sum. Throws ValidationError on a length or unit mismatch.
CategoryHistogram merge(const CategoryHistogram& a, const CategoryHistogram& b);

/// w * max(0, cosine(image, text)).
double clip_score(std::span<const double> image_emb, std::span<const double> text_emb, double w = 1.0);

struct Embedding {
  std::string id;
  std::vector<double> values;
};

/// JSON-lines {"id": str, "values": [float]}.
std::vector<Embedding> parse_embeddings(std::string_view text);
std::vector<Embedding> load_embeddings(const std::filesystem::path& path);

enum class SplitKind { kRareFirst, kNonRareFirst, kUnseenObject, kUnseenVerb };

std::string_view to_string(SplitKind kind);
/// Accepts "rf-uc", "nf-uc", "uo", "uv" (case-insensitive).
SplitKind parse_split_kind(std::string_view text);

struct ZeroShotSplit {
  SplitKind kind = SplitKind::kRareFirst;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::set<CategoryId> unseen_hoi;
  std::set<CategoryId> seen_hoi;
  std::set<ObjectClassId> unseen_objects;
  std::set<std::string> unseen_verbs;

  std::string to_json() const;
};

/// RF-UC / NF-UC take the n lowest / highest-count categories (ties by id).
/// UO / UV draw n object classes / verbs uniformly with `seed` and hold out
/// every triplet that uses them.
ZeroShotSplit make_zero_shot_split(const CategoryHistogram& hist, const TripletVocabulary& vocab, SplitKind kind,
                                   std::int64_t n, std::uint64_t seed);

ZeroShotSplit split_unseen_objects(const TripletVocabulary& vocab, const std::set<ObjectClassId>& objects);
ZeroShotSplit split_unseen_verbs(const TripletVocabulary& vocab, const std::set<std::string>& verbs);

}  // namespace hoiforge
