#pragma once

#include <span>
#include <string>
#include <vector>

#include "eroscan/raster.hpp"

namespace eroscan {

struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct Tile {
  int row = 0;
  int col = 0;
  PixelRect rect;
  /// Set on right/bottom edge tiles smaller than the nominal tile side.
  bool partial = false;
  Raster raster;
};

/// Copies the rectangle out of `r`; gsd is propagated. Throws OutOfBounds.
Raster crop(const Raster& r, const PixelRect& rect);

/// Square tiles of round(tile_m / gsd) pixels in row-major order, keeping
/// smaller edge tiles (flagged partial). Throws MissingGSD when the raster
/// has no gsd, TileLargerThanImage when the side exceeds both dimensions.
std::vector<Tile> tile_by_ground_size(const Raster& r, double tile_m);

/// rows x cols tiles; sizes differ by at most one pixel, the remainder going
/// to the leading rows/columns. Throws InvalidGrid.
std::vector<Tile> tile_grid(const Raster& r, int rows, int cols);

/// Pastes tiles back at their rects. Dimensions come from the tile extents.
Raster stitch(std::span<const Tile> tiles);

/// Sets gsd so that the raster width spans `extent_m` meters.
void set_gsd_from_extent(Raster& r, double extent_m);

/// `<stem>_r<row>_c<col>.png`
std::string tile_file_name(const std::string& stem, const Tile& t);

/// `filename,x0,y0,w,h,partial` per tile, partial as 0/1.
std::string write_tile_manifest(const std::string& stem,
                                std::span<const Tile> tiles);

}  // namespace eroscan
