#include "eroscan/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eroscan/error.hpp"

namespace eroscan {

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::count(data_.begin(), data_.end(), kOn));
}

BinaryMask& BinaryMask::operator|=(const BinaryMask& other) {
  if (other.width_ != width_ || other.height_ != height_) {
    throw Error(ErrorCode::kDimensionMismatch, "mask dimensions differ");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] |= other.data_[i];
  return *this;
}

Raster BinaryMask::to_raster() const {
  return Raster(width_, height_, 1, data_);
}

BinaryMask BinaryMask::from_raster(const Raster& r) {
  if (r.channels() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "mask must be single-channel");
  }
  BinaryMask m(r.width(), r.height());
  for (std::size_t i = 0; i < r.data().size(); ++i) {
    const auto v = r.data()[i];
    if (v != 0 && v != kOn) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mask holds value " + std::to_string(v) +
                      ", expected only 0 and 255");
    }
    m.data_[i] = v;
  }
  return m;
}

PixelScale::PixelScale(Mode mode, double value) : mode_(mode), value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel scale must be positive");
  }
}

void fill_polygon(BinaryMask& mask, std::span<const NormPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return;
  const int width = mask.width();
  const int height = mask.height();

  struct P {
    double x, y;
  };
  std::vector<P> pts(n);
  double min_y = ring[0].y * height, max_y = min_y;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {ring[i].x * width, ring[i].y * height};
    min_y = std::min(min_y, pts[i].y);
    max_y = std::max(max_y, pts[i].y);
  }

  auto mark_center = [&](int row, double x0, double x1) {
    // Columns whose center c + 0.5 lies in [x0, x1].
    const double lo = std::max(0.0, std::ceil(x0 - 0.5));
    const double hi = std::min(width - 1.0, std::floor(x1 - 0.5));
    for (int c = static_cast<int>(lo); c <= static_cast<int>(hi); ++c) {
      mask.set(c, row);
    }
  };

  const int row_lo = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
  const int row_hi =
      std::min(height - 1, static_cast<int>(std::floor(max_y - 0.5)));
  std::vector<double> xs;
  xs.reserve(n);
  for (int row = row_lo; row <= row_hi; ++row) {
    const double yc = row + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const P& a = pts[j];
      const P& b = pts[i];
      if ((a.y > yc) != (b.y > yc)) {
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
      // Centers lying exactly on an edge count as inside.
      if (a.y == yc && b.y == yc) {
        mark_center(row, std::min(a.x, b.x), std::max(a.x, b.x));
      } else if (std::min(a.y, b.y) <= yc && yc <= std::max(a.y, b.y)) {
        const double x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
        if (x - 0.5 == std::floor(x - 0.5)) mark_center(row, x, x);
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      mark_center(row, xs[k], xs[k + 1]);
    }
  }
}

BinaryMask rasterize(std::span<const Annotation> annotations, int class_id,
                     int width, int height) {
  BinaryMask mask(width, height);
  for (const auto& a : annotations) {
    if (a.class_id != class_id) continue;
    if (a.has_polygon()) {
      fill_polygon(mask, a.polygon);
    } else {
      const auto ring = box_ring(a.bbox);
      fill_polygon(mask, ring);
    }
  }
  return mask;
}

ClassMasks rasterize_classes(std::span<const Annotation> annotations,
                             const ClassMap& classes, int width, int height) {
  ClassMasks out{width, height, {}};
  for (int id = 0; id < classes.size(); ++id) {
    out.masks.emplace(id, rasterize(annotations, id, width, height));
  }
  return out;
}

BinaryMask filter_class(const ClassMasks& masks, int keep,
                        const ClassMap& classes) {
  if (!classes.contains(keep)) {
    throw Error(ErrorCode::kUnknownClass,
                "class id " + std::to_string(keep) + " not in class map");
  }
  if (auto it = masks.masks.find(keep); it != masks.masks.end()) {
    return it->second;
  }
  return BinaryMask(masks.width, masks.height);
}

AreaResult area(const BinaryMask& mask, const std::optional<PixelScale>& scale) {
  AreaResult r;
  r.pixel_count = mask.count();
  r.area_px = r.pixel_count;
  if (scale) {
    r.area_m2 = static_cast<double>(r.pixel_count) * scale->area_per_pixel();
  }
  return r;
}

const ClassColors& default_class_colors() {
  static const ClassColors kColors = {
      {0, {160, 82, 45}},
      {1, {107, 142, 35}},
      {2, {135, 206, 235}},
      {3, {0, 200, 0}},
      {4, {255, 140, 0}},
  };
  return kColors;
}

Raster overlay(const Raster& image, const ClassMasks& masks,
               const ClassColors& colors, double alpha) {
  Raster out = to_rgb(image);
  for (const auto& [class_id, mask] : masks.masks) {
    if (mask.width() != image.width() || mask.height() != image.height()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "mask " + std::to_string(mask.width()) + "x" +
                      std::to_string(mask.height()) + " does not match image " +
                      std::to_string(image.width()) + "x" +
                      std::to_string(image.height()));
    }
    const auto color = colors.find(class_id);
    if (color == colors.end()) continue;
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        if (!mask.get(x, y)) continue;
        for (int c = 0; c < 3; ++c) {
          const double blended = (1.0 - alpha) * out.at(x, y, c) +
                                 alpha * color->second[static_cast<std::size_t>(c)];
          out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(blended));
        }
      }
    }
  }
  return out;
}

}  // namespace eroscan
