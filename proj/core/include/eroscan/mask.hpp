#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "eroscan/labelset.hpp"
#include "eroscan/raster.hpp"

namespace eroscan {

/// Single-channel mask holding only 0 (background) and 255 (object).
class BinaryMask {
 public:
  static constexpr std::uint8_t kOn = 255;

  BinaryMask() = default;
  BinaryMask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool get(int x, int y) const { return data_[index(x, y)] != 0; }
  void set(int x, int y, bool on = true) { data_[index(x, y)] = on ? kOn : 0; }

  std::size_t count() const;
  const std::vector<std::uint8_t>& data() const noexcept { return data_; }

  /// Per-pixel OR; throws DimensionMismatch.
  BinaryMask& operator|=(const BinaryMask& other);

  Raster to_raster() const;
  /// Throws InvalidArgument unless the raster is single-channel {0,255}.
  static BinaryMask from_raster(const Raster& r);

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Square meters per pixel, given either as the pixel side (m) or the pixel
/// area (m^2).
class PixelScale {
 public:
  enum class Mode { kPixelSideM, kPixelAreaM2 };

  /// Throws InvalidArgument unless value > 0.
  PixelScale(Mode mode, double value);

  static PixelScale side(double meters) { return {Mode::kPixelSideM, meters}; }
  static PixelScale area(double square_meters) {
    return {Mode::kPixelAreaM2, square_meters};
  }

  Mode mode() const noexcept { return mode_; }
  double value() const noexcept { return value_; }
  double area_per_pixel() const noexcept {
    return mode_ == Mode::kPixelSideM ? value_ * value_ : value_;
  }

 private:
  Mode mode_;
  double value_;
};

struct AreaResult {
  std::size_t pixel_count = 0;
  std::size_t area_px = 0;
  std::optional<double> area_m2;
};

/// White where the pixel center is inside, or exactly on the boundary of, any
/// outline of `class_id` under the even-odd rule. Bbox-only annotations are
/// filled as rectangles.
BinaryMask rasterize(std::span<const Annotation> annotations, int class_id,
                     int width, int height);

/// Fills one ring given in normalized coordinates into `mask` (OR).
void fill_polygon(BinaryMask& mask, std::span<const NormPoint> ring);

/// One mask per class id of the class map.
struct ClassMasks {
  int width = 0;
  int height = 0;
  std::map<int, BinaryMask> masks;
};

ClassMasks rasterize_classes(std::span<const Annotation> annotations,
                             const ClassMap& classes, int width, int height);

/// The mask of `keep`, or an empty one when no mask exists for it. Throws
/// UnknownClass when `keep` is not in the class map.
BinaryMask filter_class(const ClassMasks& masks, int keep,
                        const ClassMap& classes = ClassMap::defaults());

AreaResult area(const BinaryMask& mask,
                const std::optional<PixelScale>& scale = std::nullopt);

using Rgb = std::array<std::uint8_t, 3>;
using ClassColors = std::map<int, Rgb>;

/// suelo sienna, vegetación olive, aluvial light blue, erosión fluvial green,
/// río orange.
const ClassColors& default_class_colors();

inline constexpr double kOverlayAlpha = 0.4;

/// Blends each class color into the pixels covered by its mask, in ascending
/// class order: p' = round((1 - alpha) * p + alpha * c). Gray input is
/// promoted to RGB. Throws DimensionMismatch.
Raster overlay(const Raster& image, const ClassMasks& masks,
               const ClassColors& colors = default_class_colors(),
               double alpha = kOverlayAlpha);

}  // namespace eroscan
