#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "eroscan/raster.hpp"

namespace eroscan {

enum class ImageFormat { kUnknown, kPng, kJpeg };

/// Sniffs the container format from the leading magic bytes.
ImageFormat detect_format(std::span<const std::uint8_t> bytes);

/// Decodes PNG or JPEG into a 1- or 3-channel raster. Alpha is composited
/// away; 16-bit input is reduced to 8 bits. Throws UnsupportedFormat.
Raster decode_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_png(const Raster& r);
std::vector<std::uint8_t> encode_jpeg(const Raster& r, int quality = 95);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

Raster load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Raster& r);

}  // namespace eroscan
