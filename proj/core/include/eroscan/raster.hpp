#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eroscan {

/// Interleaved 8-bit raster with 1 (gray) or 3 (RGB) channels.
///
/// `gsd` is the ground sample distance in meters per pixel side, when known.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, std::uint8_t fill = 0);
  Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  std::optional<double> gsd() const noexcept { return gsd_; }
  void set_gsd(std::optional<double> gsd) { gsd_ = gsd; }

  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

  std::span<const std::uint8_t> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * channels_,
            static_cast<std::size_t>(width_) * channels_};
  }
  std::span<std::uint8_t> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * channels_,
            static_cast<std::size_t>(width_) * channels_};
  }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  std::vector<std::uint8_t>& data() noexcept { return data_; }

  /// Pixel-exact equality; gsd is compared too.
  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
  std::optional<double> gsd_;
};

/// Replicates a single-channel raster into RGB; RGB input is returned as is.
Raster to_rgb(const Raster& r);

}  // namespace eroscan
