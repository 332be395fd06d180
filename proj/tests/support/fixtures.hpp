#pragma once

#include <string>
#include <vector>

#include "hoiforge/manifest.hpp"
#include "hoiforge/vocabulary.hpp"

namespace fixtures {

// Object classes: 0 person, 1 bicycle, 2 horse, 3 umbrella, 4 apple.
inline hoiforge::TripletVocabulary small_vocab() {
  return hoiforge::TripletVocabulary({
      {0, "ride", "riding", "bicycle", 1},
      {1, "hold", "holding", "bicycle", 1},
      {2, "ride", "riding", "horse", 2},
      {3, "feed", "feeding", "horse", 2},
      {4, "hold", "holding", "umbrella", 3},
      {5, "eat", "eating", "apple", 4},
      {6, "hug", "hugging", "person", 0},
  });
}

inline hoiforge::AttributeVocabulary small_attrs() {
  hoiforge::AttributeVocabulary a;
  a.race = {"Asian", "Black", "White", "Hispanic"};
  a.age_gender = {"young man", "old woman", "teenage girl", "middle-aged man"};
  a.environment = {"sunny park", "busy street", "quiet beach"};
  a.quality = {"highly detailed", "8k"};
  a.lighting = {"soft lighting", "golden hour"};
  a.view = {"front view", "side view"};
  a.camera = {"DSLR", "35mm lens"};
  a.negative = {"blurry", "lowres", "bad anatomy", "extra limbs", "watermark", "jpeg artifacts", "cropped"};
  return a;
}

inline hoiforge::DetectionRecord det(int cls, double x1, double y1, double x2, double y2, double conf) {
  return {"", cls, {x1, y1, x2, y2}, conf};
}

/// Box of half-size h centered at (cx, cy).
inline hoiforge::DetectionRecord det_at(int cls, double cx, double cy, double conf, double h = 5.0) {
  return det(cls, cx - h, cy - h, cx + h, cy + h, conf);
}

inline hoiforge::AnnotatedImage image(std::string id, std::vector<int> triplets,
                                      std::vector<hoiforge::DetectionRecord> dets, int w = 200, int h = 200) {
  hoiforge::AnnotatedImage img;
  img.image_id = std::move(id);
  img.file = img.image_id + ".jpg";
  img.width = w;
  img.height = h;
  img.prompt_triplets = std::move(triplets);
  img.detections = std::move(dets);
  for (auto& d : img.detections) d.image_id = img.image_id;
  return img;
}

}  // namespace fixtures
