#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hoiforge/geometry.hpp"
#include "hoiforge/hungarian.hpp"
#include "hoiforge/matrix.hpp"

namespace hoiforge {

/// Row i = softmax_k(dot(queries_i, embeddings_k)). queries is N x C,
/// embeddings is K x C; result is N x K and row-stochastic.
Matrix classifier_distribution(const Matrix& queries, const Matrix& embeddings);

/// Interaction queries from paired human/object queries: row i = (human_i + object_i) / 2.
Matrix pool_pair_queries(const Matrix& human, const Matrix& object);

/// Adds a global feature vector to every query row.
Matrix enhance_with_global(const Matrix& queries, std::span<const double> global);

/// N predicted human-object pairs with their class distributions.
struct PredictionSet {
  std::vector<CenterBox> human_boxes;
  std::vector<CenterBox> object_boxes;
  Matrix object_dist;       // N x K1
  Matrix interaction_dist;  // N x K2

  std::size_t size() const { return human_boxes.size(); }
  /// Throws ValidationError on shape mismatch, bad boxes or rows not summing to 1 +- 1e-9.
  void validate() const;
};

struct GroundTruthPair {
  CenterBox human_box;
  CenterBox object_box;
  int object_class = 0;
  int hoi_class = 0;
};

struct GroundTruthSet {
  std::vector<GroundTruthPair> entries;
  std::size_t size() const { return entries.size(); }
};

struct CostWeights {
  double box = 2.5;                   // L1 box regression
  double giou = 1.0;                  // 1 - GIoU
  double object_class = 1.0;          // object classification
  double interaction_class = 1.0;     // interaction classification

  /// All non-negative and not all zero; throws ArgumentError otherwise.
  void validate() const;
  /// Parses "b,g,co,ci".
  static CostWeights parse(std::string_view csv);
};

/// cost(i,j) = box * (L1_h + L1_o) + giou * ((1 - giou_h) + (1 - giou_o))
///           + object_class * (1 - p_obj[i][cls_j]) + interaction_class * (1 - p_int[i][hoi_j])
Matrix cost_matrix(const PredictionSet& pred, const GroundTruthSet& gt, const CostWeights& w);

inline constexpr double kProbabilityEpsilon = 1e-12;

struct LossComponents {
  double box = 0.0;                // summed L1 over matched pairs, human + object
  double giou = 0.0;               // summed (1 - GIoU) over matched pairs, human + object
  double object_class = 0.0;       // mean -log p(true object class)
  double interaction_class = 0.0;  // mean -log p(true HOI class)
};

struct LossReport {
  double total = 0.0;
  LossComponents components;
  /// Each component multiplied by its weight; sums to total.
  LossComponents weighted;
  std::size_t matched = 0;
  /// Probabilities below kProbabilityEpsilon that were clamped.
  std::size_t clamped = 0;
};

LossReport total_loss(const PredictionSet& pred, const GroundTruthSet& gt, const Assignment& a, const CostWeights& w);

/// Cost matrix, assignment and loss in one call.
struct MatchResult {
  Matrix cost;
  Assignment assignment;
  LossReport loss;
};

MatchResult match_and_score(const PredictionSet& pred, const GroundTruthSet& gt, const CostWeights& w);

PredictionSet parse_prediction_set(std::string_view json_text);
GroundTruthSet parse_ground_truth_set(std::string_view json_text);
std::string match_report_json(const MatchResult& result, const CostWeights& w);

}  // namespace hoiforge
