#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hoiforge/manifest.hpp"
#include "hoiforge/vocabulary.hpp"

namespace hoiforge {

struct LabelOptions {
  /// Detections below this confidence do not count; the boundary keeps.
  double threshold = 0.5;
  /// Detection class id that denotes a person.
  ObjectClassId person_class = 0;
  /// Worker threads for label_dataset; output order never depends on it.
  unsigned threads = 1;
};

/// True iff every prompted triplet's object class has a detection with
/// confidence >= threshold. Throws ValidationError when no triplet was prompted.
bool filter_image(const AnnotatedImage& img, const TripletVocabulary& vocab, double threshold = 0.5);

/// Two-pass human-object association.
///
/// Pass 1: every qualifying detection of a prompted object class is paired
/// with the person whose box center is nearest to the object's box center.
/// Pass 2: every person left without a label is paired with the nearest
/// qualifying object of any prompted class, taking that object's hoi_id.
/// Objects may be reused across persons. Distance ties go to the lowest
/// detection index. Throws AssociationError when no qualifying person exists.
std::vector<HoiAnnotation> associate(const AnnotatedImage& img, const TripletVocabulary& vocab,
                                     const LabelOptions& options = {});

enum class LabelStatus { kKept, kDiscarded, kFlagged };

struct LabelSummary {
  std::int64_t total = 0;
  std::int64_t kept = 0;
  std::int64_t discarded = 0;
  std::int64_t flagged = 0;
  std::vector<std::string> flagged_ids;
  /// Annotation count per HOI category over kept images.
  std::vector<std::int64_t> per_category;

  /// kept / total; 0 for an empty manifest.
  double retention() const { return total == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(total); }
  std::string to_json() const;
};

struct LabeledDataset {
  std::vector<AnnotatedImage> images;
  LabelSummary summary;
};

/// Filters and associates one image. Returns the labeled copy and its status.
std::pair<AnnotatedImage, LabelStatus> label_image(const AnnotatedImage& img, const TripletVocabulary& vocab,
                                                   const LabelOptions& options = {});

/// Labels a manifest. Errors are rethrown with the offending image_id.
LabeledDataset label_dataset(const std::vector<AnnotatedImage>& manifest, const TripletVocabulary& vocab,
                             const LabelOptions& options = {});

}  // namespace hoiforge
