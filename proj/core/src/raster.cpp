#include "eroscan/raster.hpp"

#include <string>

#include "eroscan/error.hpp"

namespace eroscan {

namespace {

void check_shape(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster must have 1 or 3 channels, got " +
                    std::to_string(channels));
  }
}

}  // namespace

Raster::Raster(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Raster::Raster(int width, int height, int channels,
               std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster data length does not match width*height*channels");
  }
}

Raster to_rgb(const Raster& r) {
  if (r.channels() == 3) return r;
  Raster out(r.width(), r.height(), 3);
  out.set_gsd(r.gsd());
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      const auto v = r.at(x, y);
      out.at(x, y, 0) = v;
      out.at(x, y, 1) = v;
      out.at(x, y, 2) = v;
    }
  }
  return out;
}

}  // namespace eroscan
