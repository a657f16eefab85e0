#include "eroscan/imageio.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

// jpeglib.h relies on size_t and FILE being declared first.
#include <jpeglib.h>

#include "eroscan/error.hpp"

namespace eroscan {

namespace {

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Raster decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kUnsupportedFormat,
                std::string("cannot read PNG: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  // Composite any alpha over black.
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&image, &background, data.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::kUnsupportedFormat,
                std::string("cannot decode PNG: ") + image.message);
  }
  return Raster(static_cast<int>(image.width), static_cast<int>(image.height),
                channels, std::move(data));
}

Raster decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  std::vector<std::uint8_t> data;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::kUnsupportedFormat,
                std::string("cannot decode JPEG: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space =
      cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int width = static_cast<int>(cinfo.output_width);
  const int height = static_cast<int>(cinfo.output_height);
  const int channels = cinfo.output_components;
  data.resize(static_cast<std::size_t>(width) * height * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = data.data() + static_cast<std::size_t>(cinfo.output_scanline) *
                                     width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return Raster(width, height, channels, std::move(data));
}

}  // namespace

ImageFormat detect_format(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngMagic[] = {0x89, 'P', 'N', 'G',
                                               0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= sizeof(kPngMagic) &&
      std::memcmp(bytes.data(), kPngMagic, sizeof(kPngMagic)) == 0) {
    return ImageFormat::kPng;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 &&
      bytes[2] == 0xFF) {
    return ImageFormat::kJpeg;
  }
  return ImageFormat::kUnknown;
}

Raster decode_image(std::span<const std::uint8_t> bytes) {
  switch (detect_format(bytes)) {
    case ImageFormat::kPng: return decode_png(bytes);
    case ImageFormat::kJpeg: return decode_jpeg(bytes);
    case ImageFormat::kUnknown: break;
  }
  throw Error(ErrorCode::kUnsupportedFormat,
              "image is neither PNG nor JPEG");
}

std::vector<std::uint8_t> encode_png(const Raster& r) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(r.width());
  image.height = static_cast<png_uint_32>(r.height());
  image.format = r.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, r.data().data(), 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIoError,
                std::string("cannot size PNG: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, r.data().data(),
                                 0, nullptr)) {
    throw Error(ErrorCode::kIoError,
                std::string("cannot encode PNG: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const Raster& r, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw Error(ErrorCode::kIoError,
                std::string("cannot encode JPEG: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(r.width());
  cinfo.image_height = static_cast<JDIMENSION>(r.height());
  cinfo.input_components = r.channels();
  cinfo.in_color_space = r.channels() == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    auto row_span = r.row(static_cast<int>(cinfo.next_scanline));
    JSAMPROW row = const_cast<JSAMPLE*>(row_span.data());
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Raster load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_image(bytes);
}

void save_png(const std::filesystem::path& path, const Raster& r) {
  write_file(path, encode_png(r));
}

}  // namespace eroscan
