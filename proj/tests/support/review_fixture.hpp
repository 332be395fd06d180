#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hoiforge/manifest.hpp"

namespace fixtures {

/// `images` kept images, image i holding 1 + i % max_anns annotations.
inline std::vector<hoiforge::AnnotatedImage> review_manifest(int images, int max_anns = 3) {
  std::vector<hoiforge::AnnotatedImage> out;
  for (int i = 0; i < images; ++i) {
    hoiforge::AnnotatedImage img;
    img.image_id = "img" + std::to_string(i);
    img.file = "images/" + img.image_id + ".jpg";
    img.width = 640;
    img.height = 480;
    img.prompt_triplets = {i % 7};
    img.kept = true;
    for (int k = 0; k < 1 + i % max_anns; ++k) {
      hoiforge::HoiAnnotation a;
      a.human_box = {10.0 + k, 10, 100, 200};
      a.object_box = {120, 50.0 + k, 220, 150};
      a.hoi_id = (i + k) % 7;
      a.pass = 1;
      img.annotations.push_back(a);
    }
    out.push_back(img);
  }
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("hoiforge_test_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
