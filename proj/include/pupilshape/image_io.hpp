#pragma once

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include "pupilshape/error.hpp"
#include "pupilshape/raster.hpp"

namespace pupilshape {

/// Rounded integer luma 0.299 R + 0.587 G + 0.114 B.
constexpr std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PnmHeaderReader {
 public:
  PnmHeaderReader(const std::vector<std::uint8_t>& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      throw Error(ErrorCode::IoError, "malformed PNM header in " + path_);
    }
    long v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) throw Error(ErrorCode::IoError, "PNM header value too large in " + path_);
      ++pos_;
    }
    return v;
  }

  std::size_t position() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const std::uint8_t ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 2;
};

inline GrayImage decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  const char kind = static_cast<char>(bytes[1]);
  PnmHeaderReader header(bytes, path);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw Error(ErrorCode::IoError, "invalid PNM dimensions or maxval in " + path);
  }
  const int channels = kind == '6' ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  std::vector<long> samples(count);

  if (kind == '2') {
    for (long& s : samples) s = header.next_int();
  } else {
    header.advance(1);  // single whitespace byte after maxval
    const std::size_t bps = maxval > 255 ? 2 : 1;
    std::size_t pos = header.position();
    if (bytes.size() < pos + count * bps) throw Error(ErrorCode::IoError, "truncated PNM data in " + path);
    for (long& s : samples) {
      s = bps == 2 ? (long(bytes[pos]) << 8) | long(bytes[pos + 1]) : long(bytes[pos]);
      pos += bps;
    }
  }

  auto to8 = [maxval](long v) -> std::uint8_t {
    if (v > maxval) v = maxval;
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  };
  GrayImage out(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (channels == 1) {
      out.data()[i] = to8(samples[i]);
    } else {
      out.data()[i] = luma(to8(samples[3 * i]), to8(samples[3 * i + 1]), to8(samples[3 * i + 2]));
    }
  }
  return out;
}

inline GrayImage decode_png(const std::string& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!fp) throw Error(ErrorCode::IoError, "cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::IoError, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoError, "libpng initialisation failed");
  }

  // Everything libpng may longjmp across is constructed before setjmp.
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  GrayImage out;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::IoError, "corrupt PNG " + path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  pixels.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out = GrayImage(static_cast<int>(width), static_cast<int>(height));
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::uint8_t* row = rows[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      const std::uint8_t* px = row + x * static_cast<std::size_t>(channels);
      out(static_cast<int>(x), static_cast<int>(y)) = channels >= 3 ? luma(px[0], px[1], px[2]) : px[0];
    }
  }
  return out;
}

}  // namespace detail

/// Loads an 8-bit grayscale view of a PGM/PPM or PNG file; colour inputs are
/// reduced to luma.
inline GrayImage read_gray_image(const std::string& path) {
  const std::vector<std::uint8_t> bytes = detail::read_file_bytes(path);
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G') {
    return detail::decode_png(path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5' || bytes[1] == '6')) {
    return detail::decode_pnm(bytes, path);
  }
  throw Error(ErrorCode::IoError, "unsupported image format: " + path);
}

/// Pixel values >= 128 are foreground.
inline BinaryMask read_mask(const std::string& path) { return mask_from_gray(read_gray_image(path)); }

inline std::string encode_pgm(const GrayImage& img) {
  std::ostringstream out;
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.size()));
  return out.str();
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  const std::string bytes = encode_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

/// Writes a mask as P5 with values {0, 255}.
inline void write_mask(const std::string& path, const BinaryMask& mask) { write_pgm(path, gray_from_mask(mask)); }

}  // namespace pupilshape
