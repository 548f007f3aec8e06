#pragma once

// Raster I/O. Reads binary PGM (P5, 8/16-bit) and PNG (gray, gray+alpha,
// palette, RGB, RGBA at 8 or 16 bits); writes P5 and PNG. Colour input is
// reduced with BT.601 luma weights and every input is scaled to [0, 1].

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "chanvese/errors.hpp"
#include "chanvese/grid.hpp"
#include "chanvese/segment.hpp"

namespace chanvese {

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// 8-bit interleaved RGB image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major, 3 bytes per pixel
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline ScalarField checked_field(int width, int height, std::vector<double> values,
                                 const std::string& path) {
  if (width < kMinGridExtent || height < kMinGridExtent) {
    throw InputError(path + ": image is " + std::to_string(width) + "x" +
                     std::to_string(height) + ", need at least 3x3");
  }
  return ScalarField(width, height, 1.0, std::move(values));
}

// PGM header tokens may be separated by whitespace and '#' comments.
inline bool read_pgm_token(std::istream& in, long& value) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) return false;
  value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1L << 30) return false;
    c = in.get();
  }
  return true;  // consumed exactly one whitespace byte after the token
}

inline ScalarField read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') throw InputError(path + ": not a binary PGM");
  long w = 0, h = 0, maxval = 0;
  if (!read_pgm_token(in, w) || !read_pgm_token(in, h) || !read_pgm_token(in, maxval) ||
      maxval < 1 || maxval > 65535) {
    throw InputError(path + ": malformed PGM header");
  }
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw InputError(path + ": truncated PGM data");
  }
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    const unsigned v = bytes == 2 ? (raw[2 * k] << 8) | raw[2 * k + 1] : raw[k];
    values[k] = std::min(1.0, static_cast<double>(v) / static_cast<double>(maxval));
  }
  return checked_field(static_cast<int>(w), static_cast<int>(h), std::move(values), path);
}

inline ScalarField read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw InputError(path + ": cannot open");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InputError(path + ": libpng initialization failed");
  }
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError(path + ": cannot decode PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // host order for uint16 access
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const double scale = out_depth == 16 ? 65535.0 : 255.0;
  std::vector<double> values(static_cast<std::size_t>(w) * h);
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x) {
      auto sample = [&](int c) -> double {
        const std::size_t idx = static_cast<std::size_t>(x) * channels + c;
        if (out_depth == 16) {
          std::uint16_t v;
          std::memcpy(&v, rows[y] + 2 * idx, 2);
          return v;
        }
        return rows[y][idx];
      };
      double v = channels >= 3
                     ? kLumaR * sample(0) + kLumaG * sample(1) + kLumaB * sample(2)
                     : sample(0);
      values[static_cast<std::size_t>(y) * w + x] = std::clamp(v / scale, 0.0, 1.0);
    }
  }
  return checked_field(static_cast<int>(w), static_cast<int>(h), std::move(values), path);
}

inline void write_png_raw(const std::string& path, int width, int height, int color_type,
                          int depth, const std::vector<std::uint8_t>& bytes) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw OutputError(path + ": cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw OutputError(path + ": libpng initialization failed");
  }
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (depth / 8);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(bytes.data() + y * stride);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw OutputError(path + ": PNG encoding failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(fp.get()) != 0) throw OutputError(path + ": write failed");
}

inline bool has_extension(const std::string& path, const char* ext) {
  std::string e = std::filesystem::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

inline std::vector<std::uint8_t> big_endian_16(const std::vector<std::uint16_t>& v) {
  std::vector<std::uint8_t> out(v.size() * 2);
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[2 * k] = static_cast<std::uint8_t>(v[k] >> 8);
    out[2 * k + 1] = static_cast<std::uint8_t>(v[k] & 0xff);
  }
  return out;
}

inline void write_pgm_raw(const std::string& path, int width, int height, int maxval,
                          const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError(path + ": cannot open for writing");
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw OutputError(path + ": write failed");
}

inline std::uint16_t to_u16(double v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

}  // namespace detail

/// Loads a P5 PGM or PNG as intensities in [0, 1], sniffing the format from
/// the file's magic bytes.
inline ScalarField load_grayscale(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw InputError(path + ": cannot open");
  std::array<unsigned char, 8> magic{};
  probe.read(reinterpret_cast<char*>(magic.data()), magic.size());
  const auto got = static_cast<std::size_t>(probe.gcount());
  probe.close();
  if (got >= 8 && png_sig_cmp(magic.data(), 0, 8) == 0) return detail::read_png(path);
  if (got >= 2 && magic[0] == 'P' && magic[1] == '5') return detail::read_pgm(path);
  throw InputError(path + ": unsupported image format (expected PNG or binary PGM)");
}

/// Writes intensities in [0, 1] as a 16-bit grayscale image; PGM when the
/// path ends in .pgm, PNG otherwise.
inline void save_grayscale16(const ScalarField& img, const std::string& path) {
  std::vector<std::uint16_t> v(img.size());
  std::transform(img.values().begin(), img.values().end(), v.begin(), detail::to_u16);
  const auto bytes = detail::big_endian_16(v);
  if (detail::has_extension(path, ".pgm")) {
    detail::write_pgm_raw(path, img.width(), img.height(), 65535, bytes);
  } else {
    detail::write_png_raw(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16, bytes);
  }
}

/// Writes a mask as 8-bit {0, 255}; PGM when the path ends in .pgm, PNG
/// otherwise.
inline void save_mask(const Mask& mask, const std::string& path) {
  std::vector<std::uint8_t> bytes(mask.size());
  std::transform(mask.values().begin(), mask.values().end(), bytes.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 255 : 0; });
  if (detail::has_extension(path, ".pgm")) {
    detail::write_pgm_raw(path, mask.width(), mask.height(), 255, bytes);
  } else {
    detail::write_png_raw(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, bytes);
  }
}

/// Grayscale image as RGB with the contour pixels painted pure red.
inline RgbImage make_overlay(const ScalarField& img, const std::vector<Pixel>& contour) {
  RgbImage out{img.width(), img.height(), std::vector<std::uint8_t>(img.size() * 3)};
  for (std::size_t k = 0; k < img.size(); ++k) {
    const auto g = static_cast<std::uint8_t>(std::lround(std::clamp(img.values()[k], 0.0, 1.0) * 255.0));
    out.data[3 * k] = out.data[3 * k + 1] = out.data[3 * k + 2] = g;
  }
  for (const Pixel& p : contour) {
    const std::size_t k = static_cast<std::size_t>(p.row) * img.width() + p.col;
    out.data[3 * k] = 255;
    out.data[3 * k + 1] = 0;
    out.data[3 * k + 2] = 0;
  }
  return out;
}

inline void save_overlay(const ScalarField& img, const std::vector<Pixel>& contour,
                         const std::string& path) {
  const RgbImage rgb = make_overlay(img, contour);
  detail::write_png_raw(path, rgb.width, rgb.height, PNG_COLOR_TYPE_RGB, 8, rgb.data);
}

/// Reads an 8-bit RGB PNG back; used to inspect overlays.
inline RgbImage load_rgb_png(const std::string& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw InputError(path + ": cannot open");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InputError(path + ": libpng initialization failed");
  }
  RgbImage out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError(path + ": cannot decode PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.data.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.data.data() + static_cast<std::size_t>(y) * out.width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

/// Level set linearly rescaled onto 0..65535 and written as a 16-bit PGM.
inline void save_phi_pgm(const LevelSetField& phi, const std::string& path) {
  const auto [lo, hi] = std::minmax_element(phi.values().begin(), phi.values().end());
  const double span = *hi - *lo;
  std::vector<std::uint16_t> v(phi.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = span > 0.0 ? detail::to_u16((phi.values()[k] - *lo) / span) : 0;
  }
  detail::write_pgm_raw(path, phi.width(), phi.height(), 65535, detail::big_endian_16(v));
}

}  // namespace chanvese
