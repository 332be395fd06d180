#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoiforge/geometry.hpp"
#include "hoiforge/vocabulary.hpp"

namespace hoiforge {

/// One detector output, in pixel corners.
struct DetectionRecord {
  std::string image_id;
  ObjectClassId class_id = 0;
  BBox box;
  double confidence = 0.0;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

enum class AnnotationSource { kAuto, kVerified, kEdited };

std::string_view to_string(AnnotationSource source);
AnnotationSource parse_annotation_source(std::string_view text);

struct HoiAnnotation {
  BBox human_box;
  BBox object_box;
  CategoryId hoi_id = 0;
  AnnotationSource source = AnnotationSource::kAuto;
  /// Association pass that produced the pairing (1 or 2); 0 when not machine-made.
  int pass = 0;

  friend bool operator==(const HoiAnnotation&, const HoiAnnotation&) = default;
};

struct AnnotatedImage {
  std::string image_id;
  std::string file;
  int width = 0;
  int height = 0;
  std::vector<CategoryId> prompt_triplets;
  std::vector<DetectionRecord> detections;
  std::vector<HoiAnnotation> annotations;
  bool kept = false;
  /// Set when labeling could not complete, e.g. "no_person".
  std::string flag;

  friend bool operator==(const AnnotatedImage&, const AnnotatedImage&) = default;
};

/// Checks box bounds, confidence range, kept/annotation consistency and, when
/// a vocabulary is given, hoi_id range. Throws ValidationError naming the image.
void validate_image(const AnnotatedImage& img, const TripletVocabulary* vocab = nullptr);

AnnotatedImage image_from_json_line(std::string_view line);
std::string image_to_json_line(const AnnotatedImage& img);

std::string annotation_to_json(const HoiAnnotation& ann);
HoiAnnotation annotation_from_json(std::string_view text);

/// JSON-lines manifest. Blank lines and a leading {"header": ...} line are skipped.
std::vector<AnnotatedImage> parse_manifest(std::string_view text);
std::vector<AnnotatedImage> read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const std::vector<AnnotatedImage>& images);
void write_manifest(const std::filesystem::path& path, const std::vector<AnnotatedImage>& images);

}  // namespace hoiforge
