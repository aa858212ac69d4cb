#include "sparsecl/depth_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <csetjmp>
#include <memory>
#include <string>
#include <vector>

#include "sparsecl/errors.hpp"

namespace sparsecl {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    if (mode[0] == 'r') throw DataError("cannot open '" + path.string() + "' for reading");
    throw DataError("cannot open '" + path.string() + "' for writing");
  }
  return f;
}

// libpng reports fatal errors through longjmp; the message is stashed here and
// rethrown as a C++ exception once control is back in our frame.
thread_local std::string png_error_message;

void on_png_error(png_structp png, png_const_charp msg) {
  png_error_message = msg ? msg : "unknown libpng error";
  png_longjmp(png, 1);
}
void on_png_warning(png_structp, png_const_charp) {}

struct DecodedPng {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<png_byte> bytes;
  std::size_t row_bytes = 0;
};

DecodedPng read_png(const std::filesystem::path& path) {
  auto file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError("'" + path.string() + "' is not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  png_infop info = png_create_info_struct(png);
  // Everything touched after setjmp is declared before it.
  DecodedPng out;
  std::vector<png_bytep> rows;
  volatile bool failed = false;
  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    out.width = png_get_image_width(png, info);
    out.height = png_get_image_height(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    out.color_type = png_get_color_type(png, info);
    if (out.bit_depth == 16) png_set_swap(png);  // host little-endian words
    png_read_update_info(png, info);
    out.row_bytes = png_get_rowbytes(png, info);
    out.bytes.resize(out.row_bytes * out.height);
    rows.resize(out.height);
    for (std::uint32_t r = 0; r < out.height; ++r) rows[r] = out.bytes.data() + r * out.row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (failed) throw FormatError("'" + path.string() + "': " + png_error_message);
  return out;
}

void write_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height,
               int bit_depth, int color_type, const std::vector<png_byte>& bytes,
               std::size_t row_bytes) {
  auto file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(height);
  for (std::uint32_t r = 0; r < height; ++r)
    rows[r] = const_cast<png_bytep>(bytes.data() + r * row_bytes);
  volatile bool failed = false;
  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  if (failed) throw DataError("failed to write '" + path.string() + "': " + png_error_message);
}

const char* color_type_name(int ct) {
  switch (ct) {
    case PNG_COLOR_TYPE_GRAY: return "gray";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "gray+alpha";
    case PNG_COLOR_TYPE_RGB: return "RGB";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "RGBA";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    default: return "unknown";
  }
}

}  // namespace

DepthMap load_depth_png(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("depth file '" + path.string() + "' does not exist");
  const DecodedPng png = read_png(path);
  if (png.color_type != PNG_COLOR_TYPE_GRAY)
    throw FormatError("'" + path.string() + "': depth PNG must have 1 channel (gray), found color type " +
                      color_type_name(png.color_type));
  if (png.bit_depth != 16)
    throw FormatError("'" + path.string() + "': depth PNG must have bit depth 16, found " +
                      std::to_string(png.bit_depth));

  std::vector<double> values(std::size_t{png.width} * png.height);
  for (std::uint32_t r = 0; r < png.height; ++r) {
    const auto* row = reinterpret_cast<const std::uint16_t*>(png.bytes.data() + r * png.row_bytes);
    for (std::uint32_t c = 0; c < png.width; ++c)
      values[std::size_t{r} * png.width + c] = static_cast<double>(row[c]) / kDepthPngScale;
  }
  return DepthMap(png.height, png.width, std::move(values));
}

void save_depth_png(const DepthMap& map, const std::filesystem::path& path) {
  const auto w = static_cast<std::uint32_t>(map.width());
  const auto h = static_cast<std::uint32_t>(map.height());
  std::vector<png_byte> bytes(std::size_t{w} * h * 2);
  auto* words = reinterpret_cast<std::uint16_t*>(bytes.data());
  const auto values = map.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!is_valid_depth(v)) {
      words[i] = 0;
      continue;
    }
    // A valid depth never rounds to the "missing" code.
    const double raw = std::clamp(std::round(v * kDepthPngScale), 1.0, 65535.0);
    words[i] = static_cast<std::uint16_t>(raw);
  }
  write_png(path, w, h, 16, PNG_COLOR_TYPE_GRAY, bytes, std::size_t{w} * 2);
}

RgbImage load_rgb_png(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("image file '" + path.string() + "' does not exist");
  const DecodedPng png = read_png(path);
  if (png.bit_depth != 8)
    throw FormatError("'" + path.string() + "': RGB PNG must have bit depth 8, found " +
                      std::to_string(png.bit_depth));
  std::size_t channels = 0;
  if (png.color_type == PNG_COLOR_TYPE_RGB) channels = 3;
  else if (png.color_type == PNG_COLOR_TYPE_RGB_ALPHA) channels = 4;
  else
    throw FormatError("'" + path.string() + "': RGB PNG must have 3 or 4 channels, found color type " +
                      color_type_name(png.color_type));

  RgbImage img(png.height, png.width);
  for (std::size_t r = 0; r < png.height; ++r) {
    const png_byte* row = png.bytes.data() + r * png.row_bytes;
    for (std::size_t c = 0; c < png.width; ++c)
      for (std::size_t ch = 0; ch < 3; ++ch) img.at(ch, r, c) = row[c * channels + ch] / 255.0;
  }
  return img;
}

void save_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
  const auto w = static_cast<std::uint32_t>(image.width);
  const auto h = static_cast<std::uint32_t>(image.height);
  std::vector<png_byte> bytes(std::size_t{w} * h * 3);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(image.at(ch, r, c), 0.0, 1.0);
        bytes[(r * w + c) * 3 + ch] = static_cast<png_byte>(std::lround(v * 255.0));
      }
  write_png(path, w, h, 8, PNG_COLOR_TYPE_RGB, bytes, std::size_t{w} * 3);
}

}  // namespace sparsecl
