#include "hoiforge/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "hoiforge/error.hpp"

namespace hoiforge {

bool BBox::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) && x1 < x2 &&
         y1 < y2;
}

bool BBox::within(double image_width, double image_height) const {
  return x1 >= 0.0 && y1 >= 0.0 && x2 <= image_width && y2 <= image_height;
}

bool CenterBox::valid() const {
  auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  return unit(cx) && unit(cy) && unit(w) && unit(h) && w > 0.0 && h > 0.0;
}

CenterBox to_normalized_center(const BBox& pixels, double image_width, double image_height) {
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw ArgumentError("image size must be positive");
  }
  return CenterBox{pixels.center_x() / image_width, pixels.center_y() / image_height,
                   pixels.width() / image_width, pixels.height() / image_height};
}

BBox to_corners(const CenterBox& box) {
  return BBox{box.cx - 0.5 * box.w, box.cy - 0.5 * box.h, box.cx + 0.5 * box.w, box.cy + 0.5 * box.h};
}

namespace {

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  return (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = std::max(a.area(), 0.0) + std::max(b.area(), 0.0) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double giou(const BBox& a, const BBox& b) {
  if (!a.valid() || !b.valid()) {
    throw ArgumentError("giou: degenerate box");
  }
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  const double hull = (std::max(a.x2, b.x2) - std::min(a.x1, b.x1)) * (std::max(a.y2, b.y2) - std::min(a.y1, b.y1));
  return inter / uni - (hull - uni) / hull;
}

double giou(const CenterBox& a, const CenterBox& b) { return giou(to_corners(a), to_corners(b)); }

double l1_distance(const CenterBox& a, const CenterBox& b) {
  return std::abs(a.cx - b.cx) + std::abs(a.cy - b.cy) + std::abs(a.w - b.w) + std::abs(a.h - b.h);
}

double center_distance(const BBox& a, const BBox& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

}  // namespace hoiforge
