#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hoiforge/geometry.hpp"
#include "hoiforge/histogram.hpp"
#include "hoiforge/manifest.hpp"
#include "hoiforge/vocabulary.hpp"

namespace hoiforge {

struct EvalPrediction {
  std::string image_id;
  BBox human_box;
  BBox object_box;
  CategoryId hoi_id = 0;
  double score = 0.0;
};

struct EvalGroundTruth {
  std::string image_id;
  BBox human_box;
  BBox object_box;
  CategoryId hoi_id = 0;
};

enum class EvalMode { kDefault, kKnownObject };

std::string_view to_string(EvalMode mode);
EvalMode parse_eval_mode(std::string_view text);

struct EvalSettings {
  double iou_threshold = 0.5;
  EvalMode mode = EvalMode::kDefault;
  int num_categories = 0;
  std::set<CategoryId> rare_set;
  /// object class of each HOI category; required in KnownObject mode.
  std::vector<ObjectClassId> hoi_object;
  /// object class -> images known to contain it; required in KnownObject mode.
  std::map<ObjectClassId, std::set<std::string>> known_object_index;
};

/// TP flags, in input order, for predictions of one image. Predictions are
/// visited by descending score (ties by input order); each takes the unmatched
/// same-category GT with the largest min(IoU_h, IoU_o) >= iou_threshold.
std::vector<bool> match_image(const std::vector<EvalPrediction>& preds, const std::vector<EvalGroundTruth>& gts,
                              double iou_threshold);

/// All-point interpolated AP over TP flags sorted by descending score.
/// nullopt when n_gt == 0.
std::optional<double> average_precision(const std::vector<bool>& flags_by_score, std::int64_t n_gt);

struct CategoryAp {
  CategoryId hoi_id = 0;
  std::optional<double> ap;
  std::int64_t n_gt = 0;
  std::int64_t n_pred = 0;
  bool rare = false;
};

struct MapReport {
  std::optional<double> full;
  std::optional<double> rare;
  std::optional<double> non_rare;
  std::vector<CategoryAp> per_category;
  /// Predictions whose score equals the previous one in their category's ranking.
  std::int64_t score_ties = 0;
  EvalSettings settings;

  std::string to_json() const;
};

MapReport map_report(const std::vector<EvalPrediction>& preds, const std::vector<EvalGroundTruth>& gts,
                     const EvalSettings& settings);

/// Categories whose training count is below `threshold`.
std::set<CategoryId> derive_rare_set(const CategoryHistogram& training, std::int64_t threshold = 10);

std::vector<EvalGroundTruth> ground_truth_from_manifest(const std::vector<AnnotatedImage>& manifest);

std::vector<EvalPrediction> parse_eval_predictions(std::string_view jsonl);
std::vector<EvalPrediction> load_eval_predictions(const std::filesystem::path& path);
std::string eval_prediction_to_json_line(const EvalPrediction& p);

/// {"<object_class_id>": ["image_id", ...], ...}
std::map<ObjectClassId, std::set<std::string>> parse_known_object_index(std::string_view json_text);

}  // namespace hoiforge
