#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eroscan::testing {

std::filesystem::path fixture_dir() { return EROSCAN_FIXTURE_DIR; }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / (prefix + "-" + std::to_string(rd()) + "-" +
                    std::to_string(counter++));
    if (std::filesystem::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Raster fixture_image() {
  Raster r(64, 48, 3);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      r.at(x, y, 0) = static_cast<std::uint8_t>(x * 4);
      r.at(x, y, 1) = static_cast<std::uint8_t>(y * 5);
      r.at(x, y, 2) = static_cast<std::uint8_t>((x + y) * 2);
    }
  }
  return r;
}

std::string fixture_predictions() {
  // Erosion: x in [10, 35] px, y in [10, 30] px -> 25 x 20 centers.
  return "3 0.156250 0.208333 0.546875 0.208333 0.546875 0.625000 0.156250 "
         "0.625000 0.900000\n"
         "4 0.700000 0.100000 0.950000 0.100000 0.820000 0.900000 0.800000\n"
         "3 0.050000 0.800000 0.100000 0.100000 0.200000\n";
}

}  // namespace eroscan::testing
