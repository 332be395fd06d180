#include "hoiforge/setmatch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hoiforge/error.hpp"
#include "json_util.hpp"

namespace hoiforge {

namespace {

void require_query_matrix(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.cols() == 0) throw ArgumentError(std::string(what) + " must be non-empty");
  if (!m.all_finite()) throw ArgumentError(std::string(what) + " has non-finite entries");
}

}  // namespace

Matrix classifier_distribution(const Matrix& queries, const Matrix& embeddings) {
  require_query_matrix(queries, "queries");
  require_query_matrix(embeddings, "category embeddings");
  if (queries.cols() != embeddings.cols()) {
    throw ArgumentError("classifier_distribution: query width " + std::to_string(queries.cols()) +
                        " != embedding width " + std::to_string(embeddings.cols()));
  }
  for (std::size_t k = 0; k < embeddings.rows(); ++k) {
    const auto r = embeddings.row(k);
    if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; })) {
      throw ArgumentError("category embedding row " + std::to_string(k) + " is all zero");
    }
  }
  Matrix out(queries.rows(), embeddings.rows());
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    const auto q = queries.row(i);
    auto logits = out.row(i);
    for (std::size_t k = 0; k < embeddings.rows(); ++k) {
      const auto t = embeddings.row(k);
      double dot = 0.0;
      for (std::size_t c = 0; c < q.size(); ++c) dot += q[c] * t[c];
      logits[k] = dot;
    }
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& l : logits) {
      l = std::exp(l - max_logit);
      sum += l;
    }
    for (double& l : logits) l /= sum;
  }
  return out;
}

Matrix pool_pair_queries(const Matrix& human, const Matrix& object) {
  require_query_matrix(human, "human queries");
  require_query_matrix(object, "object queries");
  if (human.rows() != object.rows() || human.cols() != object.cols()) {
    throw ArgumentError("pool_pair_queries: human and object query shapes differ");
  }
  Matrix out(human.rows(), human.cols());
  for (std::size_t i = 0; i < human.rows(); ++i) {
    for (std::size_t c = 0; c < human.cols(); ++c) out(i, c) = 0.5 * (human(i, c) + object(i, c));
  }
  return out;
}

Matrix enhance_with_global(const Matrix& queries, std::span<const double> global) {
  require_query_matrix(queries, "queries");
  if (global.size() != queries.cols()) throw ArgumentError("enhance_with_global: dimension mismatch");
  Matrix out = queries;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) r[c] += global[c];
  }
  return out;
}

void PredictionSet::validate() const {
  const std::size_t n = human_boxes.size();
  if (object_boxes.size() != n || object_dist.rows() != n || interaction_dist.rows() != n) {
    throw ValidationError("prediction set: box and distribution counts differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!human_boxes[i].valid() || !object_boxes[i].valid()) {
      throw ValidationError("prediction " + std::to_string(i) + ": box outside [0,1] or empty");
    }
  }
  for (const Matrix* dist : {&object_dist, &interaction_dist}) {
    for (std::size_t i = 0; i < dist->rows(); ++i) {
      double sum = 0.0;
      for (double p : dist->row(i)) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("prediction " + std::to_string(i) + ": bad probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("prediction " + std::to_string(i) + ": distribution row sums to " + std::to_string(sum));
      }
    }
  }
}

void CostWeights::validate() const {
  for (double v : {box, giou, object_class, interaction_class}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("cost weights must be finite and non-negative");
  }
  if (box == 0.0 && giou == 0.0 && object_class == 0.0 && interaction_class == 0.0) {
    throw ArgumentError("cost weights must not all be zero");
  }
}

CostWeights CostWeights::parse(std::string_view csv) {
  std::vector<double> vals;
  std::stringstream ss{std::string(csv)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ArgumentError("weights: '" + item + "' is not a number");
    }
  }
  if (vals.size() != 4) throw ArgumentError("weights: expected four comma-separated values b,g,co,ci");
  CostWeights w{vals[0], vals[1], vals[2], vals[3]};
  w.validate();
  return w;
}

namespace {

void check_classes(const PredictionSet& pred, const GroundTruthSet& gt) {
  for (std::size_t j = 0; j < gt.size(); ++j) {
    const auto& g = gt.entries[j];
    if (g.object_class < 0 || static_cast<std::size_t>(g.object_class) >= pred.object_dist.cols()) {
      throw ArgumentError("ground truth " + std::to_string(j) + ": object class out of range");
    }
    if (g.hoi_class < 0 || static_cast<std::size_t>(g.hoi_class) >= pred.interaction_dist.cols()) {
      throw ArgumentError("ground truth " + std::to_string(j) + ": hoi class out of range");
    }
  }
}

}  // namespace

Matrix cost_matrix(const PredictionSet& pred, const GroundTruthSet& gt, const CostWeights& w) {
  w.validate();
  check_classes(pred, gt);
  Matrix cost(pred.size(), gt.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      const auto& g = gt.entries[j];
      const double l1 = l1_distance(pred.human_boxes[i], g.human_box) + l1_distance(pred.object_boxes[i], g.object_box);
      const double gi = (1.0 - giou(pred.human_boxes[i], g.human_box)) + (1.0 - giou(pred.object_boxes[i], g.object_box));
      const double co = 1.0 - pred.object_dist(i, static_cast<std::size_t>(g.object_class));
      const double ci = 1.0 - pred.interaction_dist(i, static_cast<std::size_t>(g.hoi_class));
      cost(i, j) = w.box * l1 + w.giou * gi + w.object_class * co + w.interaction_class * ci;
    }
  }
  return cost;
}

LossReport total_loss(const PredictionSet& pred, const GroundTruthSet& gt, const Assignment& a, const CostWeights& w) {
  w.validate();
  check_classes(pred, gt);
  std::vector<char> pred_used(pred.size()), gt_used(gt.size());
  for (const auto& [i, j] : a.pairs) {
    if (i >= pred.size() || j >= gt.size()) throw ArgumentError("assignment index out of range");
    if (pred_used[i] || gt_used[j]) throw ArgumentError("assignment reuses an index");
    pred_used[i] = gt_used[j] = 1;
  }

  LossReport r;
  r.matched = a.pairs.size();
  auto neg_log = [&](double p) {
    if (p < kProbabilityEpsilon) {
      ++r.clamped;
      p = kProbabilityEpsilon;
    }
    return -std::log(p);
  };
  for (const auto& [i, j] : a.pairs) {
    const auto& g = gt.entries[j];
    r.components.box += l1_distance(pred.human_boxes[i], g.human_box) + l1_distance(pred.object_boxes[i], g.object_box);
    r.components.giou +=
        (1.0 - giou(pred.human_boxes[i], g.human_box)) + (1.0 - giou(pred.object_boxes[i], g.object_box));
    r.components.object_class += neg_log(pred.object_dist(i, static_cast<std::size_t>(g.object_class)));
    r.components.interaction_class += neg_log(pred.interaction_dist(i, static_cast<std::size_t>(g.hoi_class)));
  }
  if (r.matched > 0) {
    r.components.object_class /= static_cast<double>(r.matched);
    r.components.interaction_class /= static_cast<double>(r.matched);
  }
  r.weighted.box = w.box * r.components.box;
  r.weighted.giou = w.giou * r.components.giou;
  r.weighted.object_class = w.object_class * r.components.object_class;
  r.weighted.interaction_class = w.interaction_class * r.components.interaction_class;
  r.total = r.weighted.box + r.weighted.giou + r.weighted.object_class + r.weighted.interaction_class;
  return r;
}

MatchResult match_and_score(const PredictionSet& pred, const GroundTruthSet& gt, const CostWeights& w) {
  pred.validate();
  MatchResult m;
  m.cost = cost_matrix(pred, gt, w);
  m.assignment = hungarian(m.cost);
  m.loss = total_loss(pred, gt, m.assignment, w);
  return m;
}

namespace {

CenterBox decode_center_box(const detail::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw SchemaError(where + ": box must be [cx,cy,w,h]");
  try {
    return CenterBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  } catch (const detail::json::exception&) {
    throw SchemaError(where + ": box coordinate is not a number");
  }
}

std::vector<CenterBox> decode_center_boxes(const detail::json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of boxes");
  std::vector<CenterBox> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(decode_center_box(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix decode_rows(const detail::json& j, const std::string& where) {
  try {
    return Matrix::from_rows(j.get<std::vector<std::vector<double>>>());
  } catch (const detail::json::exception&) {
    throw SchemaError(where + ": expected an array of number arrays");
  } catch (const ArgumentError&) {
    throw SchemaError(where + ": ragged rows");
  }
}

detail::ordered_json encode_components(const LossComponents& c) {
  detail::ordered_json j;
  j["L_b"] = c.box;
  j["L_g"] = c.giou;
  j["L_c_o"] = c.object_class;
  j["L_c_i"] = c.interaction_class;
  return j;
}

}  // namespace

PredictionSet parse_prediction_set(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "predictions");
  PredictionSet p;
  p.human_boxes = decode_center_boxes(detail::require(doc, "human_boxes", "predictions"), "predictions.human_boxes");
  p.object_boxes = decode_center_boxes(detail::require(doc, "object_boxes", "predictions"), "predictions.object_boxes");
  p.object_dist = decode_rows(detail::require(doc, "object_dist", "predictions"), "predictions.object_dist");
  p.interaction_dist =
      decode_rows(detail::require(doc, "interaction_dist", "predictions"), "predictions.interaction_dist");
  p.validate();
  return p;
}

GroundTruthSet parse_ground_truth_set(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "ground truth");
  const auto& entries = detail::require(doc, "entries", "ground truth");
  if (!entries.is_array()) throw SchemaError("ground truth: 'entries' must be an array");
  GroundTruthSet gt;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "ground truth entry " + std::to_string(i);
    GroundTruthPair g;
    g.human_box = decode_center_box(detail::require(entries[i], "human_box", where), where + ".human_box");
    g.object_box = decode_center_box(detail::require(entries[i], "object_box", where), where + ".object_box");
    g.object_class = detail::get_as<int>(entries[i], "object_class", where);
    g.hoi_class = detail::get_as<int>(entries[i], "hoi_class", where);
    if (!g.human_box.valid() || !g.object_box.valid()) throw ValidationError(where + ": box outside [0,1] or empty");
    gt.entries.push_back(g);
  }
  return gt;
}

std::string match_report_json(const MatchResult& result, const CostWeights& w) {
  detail::ordered_json j;
  j["weights"] = {{"lambda_b", w.box}, {"lambda_g", w.giou}, {"lambda_c_o", w.object_class},
                  {"lambda_c_i", w.interaction_class}};
  j["cost_matrix"] = result.cost.to_rows();
  detail::ordered_json pairs = detail::ordered_json::array();
  for (const auto& [i, k] : result.assignment.pairs) pairs.push_back({i, k});
  j["assignment"] = std::move(pairs);
  j["assignment_cost"] = result.assignment.total_cost;
  j["total_loss"] = result.loss.total;
  j["components"] = encode_components(result.loss.components);
  j["weighted_components"] = encode_components(result.loss.weighted);
  j["matched"] = result.loss.matched;
  j["clamped_probabilities"] = result.loss.clamped;
  j["probability_epsilon"] = kProbabilityEpsilon;
  return j.dump(2);
}

}  // namespace hoiforge
