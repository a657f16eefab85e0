#pragma once

#include <span>
#include <vector>

namespace eroscan {

/// A point in normalized image coordinates: x as a fraction of width, y as a
/// fraction of height, both in [0, 1].
struct NormPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NormPoint&, const NormPoint&) = default;
};

/// Normalized center/size box.
struct BBox {
  double xc = 0.0;
  double yc = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x0() const { return xc - w / 2; }
  double y0() const { return yc - h / 2; }
  double x1() const { return xc + w / 2; }
  double y1() const { return yc + h / 2; }

  static BBox from_corners(double x0, double y0, double x1, double y1) {
    return {(x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Shoelace area, positive for counter-clockwise rings in a y-up frame.
double signed_area(std::span<const NormPoint> ring);

/// Tight axis-aligned bounding box of the ring's vertices.
BBox bounding_box(std::span<const NormPoint> ring);

/// True when no two non-adjacent edges touch and no adjacent edges fold back
/// onto each other. Rings with fewer than 3 vertices are not simple.
bool is_simple(std::span<const NormPoint> ring);

/// Sutherland-Hodgman clip of a ring against an axis-aligned rectangle.
/// Consecutive duplicate vertices are removed from the result.
std::vector<NormPoint> clip_to_rect(std::span<const NormPoint> ring, double x0,
                                    double y0, double x1, double y1);

/// Corners of a box as a ring, clockwise in image coordinates (y down).
std::vector<NormPoint> box_ring(const BBox& box);

}  // namespace eroscan
