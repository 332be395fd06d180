#pragma once

#include <vector>

#include "hoiforge/hoieval.hpp"

namespace fixtures {

// Three images, three categories, with hand-checked TP/FP patterns:
//   category 0: n_gt 2, ranked [TP, FP, TP]        -> AP 5/6
//   category 1: n_gt 1, ranked [FP, TP]            -> AP 1/2
//   category 2: n_gt 2 in img1, [TP, duplicate FP] -> AP 1/2
struct EvalFixture {
  std::vector<hoiforge::EvalPrediction> preds;
  std::vector<hoiforge::EvalGroundTruth> gts;
};

inline EvalFixture eval_fixture() {
  using hoiforge::BBox;
  const BBox h1{0, 0, 10, 10}, o1{20, 20, 30, 30};
  const BBox h2{50, 50, 60, 60}, o2{70, 70, 80, 80};
  const BBox far{100, 100, 110, 110};
  EvalFixture f;
  f.gts = {
      {"img0", h1, o1, 0}, {"img1", h1, o1, 0}, {"img2", h1, o1, 1}, {"img1", h1, o1, 2}, {"img1", h2, o2, 2},
  };
  f.preds = {
      {"img0", h1, o1, 0, 0.9}, {"img2", h1, o1, 0, 0.8}, {"img1", h1, o1, 0, 0.7},
      {"img2", far, o1, 1, 0.9}, {"img2", h1, o1, 1, 0.6},
      {"img1", h1, o1, 2, 0.9}, {"img1", h1, o1, 2, 0.5},
  };
  return f;
}

/// Object class per category and image index; only the category-0 FP in img2 falls outside it.
inline void known_object_settings(hoiforge::EvalSettings& s) {
  s.mode = hoiforge::EvalMode::kKnownObject;
  s.hoi_object = {1, 2, 3};
  s.known_object_index = {{1, {"img0", "img1"}}, {2, {"img2"}}, {3, {"img1"}}};
}

}  // namespace fixtures
