#include "hoiforge/hoieval.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "codec.hpp"
#include "hoiforge/error.hpp"

namespace hoiforge {

std::string_view to_string(EvalMode mode) { return mode == EvalMode::kDefault ? "default" : "known"; }

EvalMode parse_eval_mode(std::string_view text) {
  if (text == "default") return EvalMode::kDefault;
  if (text == "known" || text == "known-object" || text == "known_object") return EvalMode::kKnownObject;
  throw ArgumentError("unknown evaluation mode '" + std::string(text) + "' (expected default|known)");
}

namespace {

double pair_overlap(const BBox& ph, const BBox& po, const BBox& gh, const BBox& go) {
  return std::min(iou(ph, gh), iou(po, go));
}

std::vector<std::size_t> by_descending_score(const std::vector<EvalPrediction>& preds,
                                             const std::vector<std::size_t>& subset) {
  std::vector<std::size_t> order = subset;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
  return order;
}

}  // namespace

std::vector<bool> match_image(const std::vector<EvalPrediction>& preds, const std::vector<EvalGroundTruth>& gts,
                              double iou_threshold) {
  std::vector<std::size_t> all(preds.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<bool> flags(preds.size(), false);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t i : by_descending_score(preds, all)) {
    const auto& p = preds[i];
    std::optional<std::size_t> best;
    double best_overlap = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].hoi_id != p.hoi_id) continue;
      const double ov = pair_overlap(p.human_box, p.object_box, gts[g].human_box, gts[g].object_box);
      if (ov >= iou_threshold && ov > best_overlap) {
        best_overlap = ov;
        best = g;
      }
    }
    if (best) {
      taken[*best] = true;
      flags[i] = true;
    }
  }
  return flags;
}

std::optional<double> average_precision(const std::vector<bool>& flags_by_score, std::int64_t n_gt) {
  if (n_gt < 0) throw ArgumentError("average_precision: negative ground-truth count");
  if (n_gt == 0) return std::nullopt;
  const std::size_t n = flags_by_score.size();
  std::vector<double> recall(n), precision(n);
  std::int64_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (flags_by_score[k]) ++tp;
    recall[k] = static_cast<double>(tp) / static_cast<double>(n_gt);
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  // Precision envelope: max precision at any rank with recall >= this one.
  for (std::size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

MapReport map_report(const std::vector<EvalPrediction>& preds, const std::vector<EvalGroundTruth>& gts,
                     const EvalSettings& settings) {
  if (!(settings.iou_threshold > 0.0 && settings.iou_threshold < 1.0)) {
    throw ConfigError("iou_threshold must be in (0, 1)");
  }
  const int k2 = settings.num_categories;
  if (k2 <= 0) throw ConfigError("num_categories must be positive");
  for (CategoryId c : settings.rare_set) {
    if (c < 0 || c >= k2) throw ConfigError("rare set holds unknown category " + std::to_string(c));
  }
  const bool known = settings.mode == EvalMode::kKnownObject;
  if (known) {
    if (settings.known_object_index.empty()) throw ConfigError("Known-Object mode needs a known_object_index");
    if (settings.hoi_object.size() != static_cast<std::size_t>(k2)) {
      throw ConfigError("Known-Object mode needs the object class of every category");
    }
  }

  std::vector<std::vector<std::size_t>> pred_by_cat(static_cast<std::size_t>(k2));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    if (p.hoi_id < 0 || p.hoi_id >= k2) throw ValidationError("prediction " + std::to_string(i) + ": hoi_id out of range");
    if (!(p.score >= 0.0 && p.score <= 1.0)) throw ValidationError("prediction " + std::to_string(i) + ": score outside [0,1]");
    pred_by_cat[static_cast<std::size_t>(p.hoi_id)].push_back(i);
  }
  // category -> image -> gt indices
  std::vector<std::unordered_map<std::string, std::vector<std::size_t>>> gt_by_cat(static_cast<std::size_t>(k2));
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (gts[g].hoi_id < 0 || gts[g].hoi_id >= k2) {
      throw ValidationError("ground truth " + std::to_string(g) + ": hoi_id out of range");
    }
    gt_by_cat[static_cast<std::size_t>(gts[g].hoi_id)][gts[g].image_id].push_back(g);
  }

  MapReport report;
  report.settings = settings;
  static const std::set<std::string> kNoImages;
  for (int c = 0; c < k2; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    const std::set<std::string>* allowed = nullptr;
    if (known) {
      auto it = settings.known_object_index.find(settings.hoi_object[cu]);
      allowed = it == settings.known_object_index.end() ? &kNoImages : &it->second;
    }
    auto in_pool = [&](const std::string& image_id) { return allowed == nullptr || allowed->contains(image_id); };

    CategoryAp cat;
    cat.hoi_id = c;
    cat.rare = settings.rare_set.contains(c);
    std::unordered_map<std::string, std::vector<bool>> taken;
    for (const auto& [image_id, idx] : gt_by_cat[cu]) {
      if (!in_pool(image_id)) continue;
      cat.n_gt += static_cast<std::int64_t>(idx.size());
      taken[image_id].assign(idx.size(), false);
    }
    std::vector<std::size_t> pool;
    for (std::size_t i : pred_by_cat[cu]) {
      if (in_pool(preds[i].image_id)) pool.push_back(i);
    }
    cat.n_pred = static_cast<std::int64_t>(pool.size());
    const auto order = by_descending_score(preds, pool);
    std::vector<bool> flags;
    flags.reserve(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto& p = preds[order[r]];
      if (r > 0 && preds[order[r - 1]].score == p.score) ++report.score_ties;
      bool tp = false;
      auto git = gt_by_cat[cu].find(p.image_id);
      if (git != gt_by_cat[cu].end()) {
        auto& used = taken[p.image_id];
        std::optional<std::size_t> best;
        double best_overlap = -1.0;
        for (std::size_t k = 0; k < git->second.size(); ++k) {
          if (used[k]) continue;
          const auto& g = gts[git->second[k]];
          const double ov = pair_overlap(p.human_box, p.object_box, g.human_box, g.object_box);
          if (ov >= settings.iou_threshold && ov > best_overlap) {
            best_overlap = ov;
            best = k;
          }
        }
        if (best) {
          used[*best] = true;
          tp = true;
        }
      }
      flags.push_back(tp);
    }
    cat.ap = average_precision(flags, cat.n_gt);
    report.per_category.push_back(cat);
  }

  auto mean_over = [&](auto&& include) -> std::optional<double> {
    double sum = 0.0;
    std::int64_t count = 0;
    for (const auto& cat : report.per_category) {
      if (cat.ap && include(cat)) {
        sum += *cat.ap;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  };
  report.full = mean_over([](const CategoryAp&) { return true; });
  report.rare = mean_over([](const CategoryAp& c) { return c.rare; });
  report.non_rare = mean_over([](const CategoryAp& c) { return !c.rare; });
  return report;
}

std::set<CategoryId> derive_rare_set(const CategoryHistogram& training, std::int64_t threshold) {
  std::set<CategoryId> rare;
  for (std::size_t c = 0; c < training.size(); ++c) {
    if (training[c] < threshold) rare.insert(static_cast<CategoryId>(c));
  }
  return rare;
}

std::vector<EvalGroundTruth> ground_truth_from_manifest(const std::vector<AnnotatedImage>& manifest) {
  std::vector<EvalGroundTruth> out;
  for (const auto& img : manifest) {
    for (const auto& a : img.annotations) out.push_back({img.image_id, a.human_box, a.object_box, a.hoi_id});
  }
  return out;
}

std::vector<EvalPrediction> parse_eval_predictions(std::string_view jsonl) {
  std::vector<EvalPrediction> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "predictions line " + std::to_string(line_no);
    const auto j = detail::parse_json(line, where);
    EvalPrediction p;
    p.image_id = detail::get_as<std::string>(j, "image_id", where);
    p.human_box = detail::decode_box(detail::require(j, "human_box", where), where);
    p.object_box = detail::decode_box(detail::require(j, "object_box", where), where);
    p.hoi_id = detail::get_as<int>(j, "hoi_id", where);
    p.score = detail::get_as<double>(j, "score", where);
    if (!(p.score >= 0.0 && p.score <= 1.0)) throw ValidationError(where + ": score outside [0,1]");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<EvalPrediction> load_eval_predictions(const std::filesystem::path& path) {
  return parse_eval_predictions(detail::read_text_file(path));
}

std::string eval_prediction_to_json_line(const EvalPrediction& p) {
  detail::ordered_json j;
  j["image_id"] = p.image_id;
  j["human_box"] = detail::encode_box(p.human_box);
  j["object_box"] = detail::encode_box(p.object_box);
  j["hoi_id"] = p.hoi_id;
  j["score"] = p.score;
  return j.dump();
}

std::map<ObjectClassId, std::set<std::string>> parse_known_object_index(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "known-object index");
  if (!doc.is_object()) throw SchemaError("known-object index: expected an object keyed by object class id");
  std::map<ObjectClassId, std::set<std::string>> index;
  for (const auto& [key, value] : doc.items()) {
    ObjectClassId id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::logic_error&) {
      throw SchemaError("known-object index: key '" + key + "' is not an object class id");
    }
    try {
      auto ids = value.get<std::vector<std::string>>();
      index[id].insert(ids.begin(), ids.end());
    } catch (const detail::json::exception&) {
      throw SchemaError("known-object index: value for '" + key + "' must be a list of image ids");
    }
  }
  return index;
}

std::string MapReport::to_json() const {
  auto opt = [](const std::optional<double>& v) -> detail::ordered_json {
    return v ? detail::ordered_json(*v) : detail::ordered_json(nullptr);
  };
  detail::ordered_json j;
  detail::ordered_json header;
  header["matching"] = "min(IoU_human, IoU_object) >= iou_threshold, greedy by descending score";
  header["interpolation"] = "all-point";
  header["iou_threshold"] = settings.iou_threshold;
  header["mode"] = to_string(settings.mode);
  header["score_ties"] = score_ties;
  j["header"] = std::move(header);
  j["full"] = opt(full);
  j["rare"] = opt(rare);
  j["non_rare"] = opt(non_rare);
  detail::ordered_json cats = detail::ordered_json::array();
  for (const auto& c : per_category) {
    detail::ordered_json cj;
    cj["hoi_id"] = c.hoi_id;
    cj["ap"] = opt(c.ap);
    cj["n_gt"] = c.n_gt;
    cj["n_pred"] = c.n_pred;
    cj["rare"] = c.rare;
    cats.push_back(std::move(cj));
  }
  j["per_category"] = std::move(cats);
  return j.dump(2);
}

}  // namespace hoiforge
