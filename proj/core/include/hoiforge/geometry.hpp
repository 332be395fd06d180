#pragma once

#include <array>

namespace hoiforge {

/// Axis-aligned box in corner form (x1, y1, x2, y2).
///
/// Manifests store pixel corners. Loss and matching math works on normalized
/// center form (CenterBox); `to_normalized_center` and `to_corners` are the
/// only conversions between the two.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  /// x1 < x2, y1 < y2, all finite.
  bool valid() const;
  bool within(double image_width, double image_height) const;

  std::array<double, 4> as_array() const { return {x1, y1, x2, y2}; }
  static BBox from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Normalized (cx, cy, w, h), all in [0, 1].
struct CenterBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool valid() const;
  std::array<double, 4> as_array() const { return {cx, cy, w, h}; }

  friend bool operator==(const CenterBox&, const CenterBox&) = default;
};

CenterBox to_normalized_center(const BBox& pixels, double image_width, double image_height);
BBox to_corners(const CenterBox& box);

/// Intersection over union; 0 when the union is empty.
double iou(const BBox& a, const BBox& b);

/// Generalized IoU in (-1, 1]. Throws ArgumentError on a degenerate box.
double giou(const BBox& a, const BBox& b);
double giou(const CenterBox& a, const CenterBox& b);

/// Sum of absolute coordinate differences in (cx, cy, w, h).
double l1_distance(const CenterBox& a, const CenterBox& b);

double center_distance(const BBox& a, const BBox& b);

}  // namespace hoiforge
