#include "hoiforge/autolabel.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <optional>

#include "hoiforge/error.hpp"
#include "json_util.hpp"

namespace hoiforge {

namespace {

std::vector<CategoryId> distinct_in_order(const std::vector<CategoryId>& ids) {
  std::vector<CategoryId> out;
  for (CategoryId id : ids) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

bool qualifies(const DetectionRecord& d, double threshold) { return d.confidence >= threshold; }

}  // namespace

bool filter_image(const AnnotatedImage& img, const TripletVocabulary& vocab, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("threshold must be in [0, 1]");
  if (img.prompt_triplets.empty()) throw ValidationError("image " + img.image_id + ": no prompted triplets");
  for (CategoryId id : img.prompt_triplets) {
    const ObjectClassId cls = vocab.object_of(id);
    const bool found = std::any_of(img.detections.begin(), img.detections.end(), [&](const DetectionRecord& d) {
      return d.class_id == cls && qualifies(d, threshold);
    });
    if (!found) return false;
  }
  return true;
}

std::vector<HoiAnnotation> associate(const AnnotatedImage& img, const TripletVocabulary& vocab,
                                     const LabelOptions& options) {
  const auto& dets = img.detections;
  std::vector<std::size_t> persons;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].class_id == options.person_class && qualifies(dets[i], options.threshold)) persons.push_back(i);
  }
  if (persons.empty()) throw AssociationError("image " + img.image_id + ": no person detections");

  const auto triplets = distinct_in_order(img.prompt_triplets);
  std::vector<HoiAnnotation> out;
  std::vector<bool> labeled(dets.size(), false);

  auto make = [&](std::size_t person, std::size_t object, CategoryId hoi, int pass) {
    HoiAnnotation a;
    a.human_box = dets[person].box;
    a.object_box = dets[object].box;
    a.hoi_id = hoi;
    a.source = AnnotationSource::kAuto;
    a.pass = pass;
    return a;
  };

  // Pass 1: object -> nearest person.
  for (CategoryId hoi : triplets) {
    const ObjectClassId cls = vocab.object_of(hoi);
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (dets[j].class_id != cls || !qualifies(dets[j], options.threshold)) continue;
      std::optional<std::size_t> best;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t p : persons) {
        if (p == j) continue;
        const double d = center_distance(dets[p].box, dets[j].box);
        if (d < best_dist) {
          best_dist = d;
          best = p;
        }
      }
      if (!best) continue;
      labeled[*best] = true;
      out.push_back(make(*best, j, hoi, 1));
    }
  }

  // Pass 2: unlabeled person -> nearest qualifying object.
  for (std::size_t p : persons) {
    if (labeled[p]) continue;
    std::optional<std::size_t> best_obj;
    CategoryId best_hoi = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (j == p || !qualifies(dets[j], options.threshold)) continue;
      for (CategoryId hoi : triplets) {
        if (dets[j].class_id != vocab.object_of(hoi)) continue;
        const double d = center_distance(dets[p].box, dets[j].box);
        if (d < best_dist) {
          best_dist = d;
          best_obj = j;
          best_hoi = hoi;
        }
        break;  // first prompted triplet for this class
      }
    }
    if (best_obj) out.push_back(make(p, *best_obj, best_hoi, 2));
  }
  return out;
}

std::pair<AnnotatedImage, LabelStatus> label_image(const AnnotatedImage& img, const TripletVocabulary& vocab,
                                                   const LabelOptions& options) {
  AnnotatedImage out = img;
  out.annotations.clear();
  out.kept = false;
  out.flag.clear();
  validate_image(out, &vocab);
  if (!filter_image(out, vocab, options.threshold)) return {std::move(out), LabelStatus::kDiscarded};
  try {
    out.annotations = associate(out, vocab, options);
  } catch (const AssociationError&) {
    out.flag = "no_person";
    return {std::move(out), LabelStatus::kFlagged};
  }
  out.kept = true;
  return {std::move(out), LabelStatus::kKept};
}

LabeledDataset label_dataset(const std::vector<AnnotatedImage>& manifest, const TripletVocabulary& vocab,
                             const LabelOptions& options) {
  using Result = std::pair<AnnotatedImage, LabelStatus>;
  std::vector<std::optional<Result>> results(manifest.size());
  std::vector<std::exception_ptr> errors(manifest.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        results[i] = label_image(manifest[i], vocab, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, manifest.size()));
  if (workers <= 1) {
    work(0, manifest.size());
  } else {
    std::vector<std::future<void>> tasks;
    const std::size_t chunk = (manifest.size() + workers - 1) / workers;
    for (std::size_t b = 0; b < manifest.size(); b += chunk) {
      tasks.push_back(std::async(std::launch::async, work, b, std::min(manifest.size(), b + chunk)));
    }
    for (auto& t : tasks) t.get();
  }

  LabeledDataset ds;
  ds.summary.per_category.assign(static_cast<std::size_t>(vocab.num_categories()), 0);
  ds.images.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        throw ValidationError("image " + manifest[i].image_id + " (manifest index " + std::to_string(i) +
                              "): " + e.what());
      }
    }
    auto& [img, status] = *results[i];
    ++ds.summary.total;
    switch (status) {
      case LabelStatus::kKept:
        ++ds.summary.kept;
        for (const auto& a : img.annotations) ++ds.summary.per_category[static_cast<std::size_t>(a.hoi_id)];
        break;
      case LabelStatus::kDiscarded:
        ++ds.summary.discarded;
        break;
      case LabelStatus::kFlagged:
        ++ds.summary.flagged;
        ds.summary.flagged_ids.push_back(img.image_id);
        break;
    }
    ds.images.push_back(std::move(img));
  }
  return ds;
}

std::string LabelSummary::to_json() const {
  detail::ordered_json j;
  j["total"] = total;
  j["kept"] = kept;
  j["discarded"] = discarded;
  j["flagged"] = flagged;
  j["retention"] = retention();
  j["flagged_ids"] = flagged_ids;
  j["per_category"] = per_category;
  return j.dump(2);
}

}  // namespace hoiforge
