#include "eroscan/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace eroscan {

namespace {

double cross(const NormPoint& o, const NormPoint& a, const NormPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(const NormPoint& o, const NormPoint& a, const NormPoint& b) {
  const double v = cross(o, a, b);
  return (v > 0) - (v < 0);
}

bool on_segment(const NormPoint& p, const NormPoint& a, const NormPoint& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_touch(const NormPoint& p1, const NormPoint& p2,
                    const NormPoint& q1, const NormPoint& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

template <typename Inside, typename Intersect>
std::vector<NormPoint> clip_edge(const std::vector<NormPoint>& in,
                                 Inside inside, Intersect intersect) {
  std::vector<NormPoint> out;
  if (in.empty()) return out;
  out.reserve(in.size() + 4);
  NormPoint prev = in.back();
  bool prev_in = inside(prev);
  for (const auto& cur : in) {
    const bool cur_in = inside(cur);
    if (cur_in) {
      if (!prev_in) out.push_back(intersect(prev, cur));
      out.push_back(cur);
    } else if (prev_in) {
      out.push_back(intersect(prev, cur));
    }
    prev = cur;
    prev_in = cur_in;
  }
  return out;
}

NormPoint at_x(const NormPoint& a, const NormPoint& b, double x) {
  const double t = (x - a.x) / (b.x - a.x);
  return {x, a.y + t * (b.y - a.y)};
}

NormPoint at_y(const NormPoint& a, const NormPoint& b, double y) {
  const double t = (y - a.y) / (b.y - a.y);
  return {a.x + t * (b.x - a.x), y};
}

}  // namespace

double signed_area(std::span<const NormPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  return twice / 2;
}

BBox bounding_box(std::span<const NormPoint> ring) {
  if (ring.empty()) return {};
  double x0 = ring[0].x, x1 = ring[0].x, y0 = ring[0].y, y1 = ring[0].y;
  for (const auto& p : ring) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return BBox::from_corners(x0, y0, x1, y1);
}

bool is_simple(std::span<const NormPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (ring[i] == ring[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a1 = ring[i];
    const auto& a2 = ring[(i + 1) % n];
    // Adjacent edge folding back over this one.
    const auto& a3 = ring[(i + 2) % n];
    if (orientation(a1, a2, a3) == 0) {
      const double dot =
          (a2.x - a1.x) * (a3.x - a2.x) + (a2.y - a1.y) * (a3.y - a2.y);
      if (dot < 0) return false;
    }
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(a1, a2, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::vector<NormPoint> clip_to_rect(std::span<const NormPoint> ring, double x0,
                                    double y0, double x1, double y1) {
  std::vector<NormPoint> poly(ring.begin(), ring.end());
  poly = clip_edge(
      poly, [&](const NormPoint& p) { return p.x >= x0; },
      [&](const NormPoint& a, const NormPoint& b) { return at_x(a, b, x0); });
  poly = clip_edge(
      poly, [&](const NormPoint& p) { return p.x <= x1; },
      [&](const NormPoint& a, const NormPoint& b) { return at_x(a, b, x1); });
  poly = clip_edge(
      poly, [&](const NormPoint& p) { return p.y >= y0; },
      [&](const NormPoint& a, const NormPoint& b) { return at_y(a, b, y0); });
  poly = clip_edge(
      poly, [&](const NormPoint& p) { return p.y <= y1; },
      [&](const NormPoint& a, const NormPoint& b) { return at_y(a, b, y1); });

  std::vector<NormPoint> out;
  out.reserve(poly.size());
  for (const auto& p : poly) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

std::vector<NormPoint> box_ring(const BBox& box) {
  return {{box.x0(), box.y0()},
          {box.x1(), box.y0()},
          {box.x1(), box.y1()},
          {box.x0(), box.y1()}};
}

}  // namespace eroscan
