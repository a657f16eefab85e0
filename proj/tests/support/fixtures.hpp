#pragma once

#include <filesystem>
#include <string>

#include "eroscan/raster.hpp"

namespace eroscan::testing {

std::filesystem::path fixture_dir();

std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "eroscan");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const {
    return path_ / rel;
  }

 private:
  std::filesystem::path path_;
};

/// Deterministic 64x48 RGB gradient used by the service goldens.
Raster fixture_image();

/// One erosion rectangle covering exactly 500 pixel centers of the fixture
/// image, a river triangle, and a low-confidence erosion box.
std::string fixture_predictions();

inline constexpr std::size_t kFixtureErosionPixels = 500;

}  // namespace eroscan::testing
