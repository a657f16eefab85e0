#include "eroscan/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "eroscan/error.hpp"

namespace eroscan {

namespace {

std::vector<int> split_lengths(int total, int parts) {
  std::vector<int> out(static_cast<std::size_t>(parts), total / parts);
  for (int i = 0; i < total % parts; ++i) ++out[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

Raster crop(const Raster& r, const PixelRect& rect) {
  if (rect.w < 1 || rect.h < 1 || rect.x0 < 0 || rect.y0 < 0 ||
      rect.x0 + rect.w > r.width() || rect.y0 + rect.h > r.height()) {
    throw Error(ErrorCode::kOutOfBounds,
                "crop rect (" + std::to_string(rect.x0) + "," +
                    std::to_string(rect.y0) + "," + std::to_string(rect.w) +
                    "," + std::to_string(rect.h) + ") outside " +
                    std::to_string(r.width()) + "x" +
                    std::to_string(r.height()) + " raster");
  }
  Raster out(rect.w, rect.h, r.channels());
  out.set_gsd(r.gsd());
  const std::size_t span = static_cast<std::size_t>(rect.w) * r.channels();
  for (int y = 0; y < rect.h; ++y) {
    const auto src = r.row(rect.y0 + y);
    std::memcpy(out.row(y).data(),
                src.data() + static_cast<std::size_t>(rect.x0) * r.channels(),
                span);
  }
  return out;
}

std::vector<Tile> tile_by_ground_size(const Raster& r, double tile_m) {
  if (!r.gsd() || !(*r.gsd() > 0.0)) {
    throw Error(ErrorCode::kMissingGsd,
                "raster has no ground sample distance");
  }
  if (!(tile_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tile size must be positive");
  }
  const double side_px = std::round(tile_m / *r.gsd());
  if (side_px < 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "tile size is smaller than one pixel");
  }
  if (side_px > r.width() && side_px > r.height()) {
    throw Error(ErrorCode::kTileLargerThanImage,
                "tile side of " + std::to_string(static_cast<long>(side_px)) +
                    " px exceeds the " + std::to_string(r.width()) + "x" +
                    std::to_string(r.height()) + " raster");
  }
  const int side = static_cast<int>(side_px);
  const int cols = (r.width() + side - 1) / side;
  const int rows = (r.height() + side - 1) / side;

  std::vector<Tile> tiles;
  tiles.reserve(static_cast<std::size_t>(rows) * cols);
  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      Tile t;
      t.row = row;
      t.col = col;
      t.rect.x0 = col * side;
      t.rect.y0 = row * side;
      t.rect.w = std::min(side, r.width() - t.rect.x0);
      t.rect.h = std::min(side, r.height() - t.rect.y0);
      t.partial = t.rect.w < side || t.rect.h < side;
      t.raster = crop(r, t.rect);
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

std::vector<Tile> tile_grid(const Raster& r, int rows, int cols) {
  if (rows < 1 || cols < 1 || rows > r.height() || cols > r.width()) {
    throw Error(ErrorCode::kInvalidGrid,
                "grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " does not fit a " + std::to_string(r.width()) + "x" +
                    std::to_string(r.height()) + " raster");
  }
  const auto widths = split_lengths(r.width(), cols);
  const auto heights = split_lengths(r.height(), rows);
  std::vector<Tile> tiles;
  tiles.reserve(static_cast<std::size_t>(rows) * cols);
  int y = 0;
  for (int row = 0; row < rows; ++row) {
    int x = 0;
    for (int col = 0; col < cols; ++col) {
      Tile t;
      t.row = row;
      t.col = col;
      t.rect = {x, y, widths[static_cast<std::size_t>(col)],
                heights[static_cast<std::size_t>(row)]};
      t.raster = crop(r, t.rect);
      x += t.rect.w;
      tiles.push_back(std::move(t));
    }
    y += heights[static_cast<std::size_t>(row)];
  }
  return tiles;
}

Raster stitch(std::span<const Tile> tiles) {
  if (tiles.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no tiles to stitch");
  }
  int width = 0, height = 0;
  for (const auto& t : tiles) {
    width = std::max(width, t.rect.x0 + t.rect.w);
    height = std::max(height, t.rect.y0 + t.rect.h);
  }
  const int channels = tiles.front().raster.channels();
  Raster out(width, height, channels);
  out.set_gsd(tiles.front().raster.gsd());
  for (const auto& t : tiles) {
    if (t.raster.channels() != channels || t.raster.width() != t.rect.w ||
        t.raster.height() != t.rect.h) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "tile raster does not match its rect");
    }
    for (int y = 0; y < t.rect.h; ++y) {
      const auto src = t.raster.row(y);
      std::memcpy(out.row(t.rect.y0 + y).data() +
                      static_cast<std::size_t>(t.rect.x0) * channels,
                  src.data(), src.size());
    }
  }
  return out;
}

void set_gsd_from_extent(Raster& r, double extent_m) {
  if (!(extent_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "extent must be positive");
  }
  r.set_gsd(extent_m / r.width());
}

std::string tile_file_name(const std::string& stem, const Tile& t) {
  return stem + "_r" + std::to_string(t.row) + "_c" + std::to_string(t.col) +
         ".png";
}

std::string write_tile_manifest(const std::string& stem,
                                std::span<const Tile> tiles) {
  std::string out = "file,x0,y0,w,h,partial\n";
  for (const auto& t : tiles) {
    out += tile_file_name(stem, t) + ',' + std::to_string(t.rect.x0) + ',' +
           std::to_string(t.rect.y0) + ',' + std::to_string(t.rect.w) + ',' +
           std::to_string(t.rect.h) + ',' + (t.partial ? '1' : '0') + '\n';
  }
  return out;
}

}  // namespace eroscan
