#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pupilshape/error.hpp"

namespace pupilshape {

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Row-major raster with one byte per pixel. Shared storage for masks and
/// grayscale images.
template <typename Tag>
class Raster {
 public:
  Raster() = default;

  Raster(int width, int height, std::uint8_t fill = 0) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "raster dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Raster(int width, int height, std::vector<std::uint8_t> data) : Raster(width, height) {
    if (data.size() != data_.size()) {
      throw Error(ErrorCode::DimensionMismatch, "data length does not match width*height");
    }
    data_ = std::move(data);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::uint8_t& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  std::uint8_t operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  std::vector<std::uint8_t>& data() noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct MaskTag {};
struct GrayTag {};

/// Pixel values are 0 (background) or 1 (foreground).
using BinaryMask = Raster<MaskTag>;
/// 8-bit intensities.
using GrayImage = Raster<GrayTag>;

inline std::size_t foreground_count(const BinaryMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; }));
}

inline bool is_empty(const BinaryMask& mask) {
  return std::none_of(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; });
}

/// Outer-boundary pixel set of a mask component, in row-major order.
struct Contour {
  std::vector<Pixel> points;
  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

namespace detail {

inline constexpr int kDx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
inline constexpr int kDy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
inline constexpr int kDx4[4] = {0, -1, 1, 0};
inline constexpr int kDy4[4] = {-1, 0, 0, 1};

inline void require_nonempty(const BinaryMask& mask, const char* what) {
  if (mask.size() == 0 || is_empty(mask)) {
    throw Error(ErrorCode::EmptyMask, std::string(what) + ": mask has no foreground pixel");
  }
}

}  // namespace detail

/// Labels 8-connected foreground components. Labels start at 1 and are
/// assigned in row-major order of each component's first pixel, which is
/// also its top-left-most pixel. Returns the number of components.
inline int label_components(const BinaryMask& mask, std::vector<int>& labels) {
  labels.assign(mask.size(), 0);
  int next = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y) || labels[mask.index(x, y)] != 0) continue;
      ++next;
      labels[mask.index(x, y)] = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nx = p.x + detail::kDx8[k];
          const int ny = p.y + detail::kDy8[k];
          if (!mask.contains(nx, ny) || !mask(nx, ny)) continue;
          int& l = labels[mask.index(nx, ny)];
          if (l == 0) {
            l = next;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return next;
}

/// Keeps the 8-connected component with the most pixels. Ties go to the
/// component whose top-left-most pixel comes first in row-major order.
inline BinaryMask largest_component(const BinaryMask& mask) {
  detail::require_nonempty(mask, "largest_component");
  std::vector<int> labels;
  const int n = label_components(mask, labels);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n) + 1, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  int best = 1;
  for (int l = 2; l <= n; ++l) {
    if (sizes[static_cast<std::size_t>(l)] > sizes[static_cast<std::size_t>(best)]) best = l;
  }
  BinaryMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < labels.size(); ++i) out.data()[i] = labels[i] == best ? 1 : 0;
  return out;
}

/// Background pixels not 4-connected to the raster border become foreground.
inline BinaryMask fill_holes(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> outside(mask.size(), 0);
  std::vector<Pixel> stack;
  auto seed = [&](int x, int y) {
    if (!mask(x, y) && !outside[mask.index(x, y)]) {
      outside[mask.index(x, y)] = 1;
      stack.push_back({x, y});
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!stack.empty()) {
    const Pixel p = stack.back();
    stack.pop_back();
    for (int k = 0; k < 4; ++k) {
      const int nx = p.x + detail::kDx4[k];
      const int ny = p.y + detail::kDy4[k];
      if (mask.contains(nx, ny)) seed(nx, ny);
    }
  }
  BinaryMask out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = outside[i] ? 0 : 1;
  return out;
}

/// True if (x, y) is foreground and has a background 8-neighbour or sits on
/// the raster border.
inline bool is_boundary_pixel(const BinaryMask& mask, int x, int y) {
  if (!mask(x, y)) return false;
  if (x == 0 || y == 0 || x == mask.width() - 1 || y == mask.height() - 1) return true;
  for (int k = 0; k < 8; ++k) {
    if (!mask(x + detail::kDx8[k], y + detail::kDy8[k])) return true;
  }
  return false;
}

/// Boundary pixels of `mask` as-is (holes, if any, contribute).
inline Contour boundary_pixels(const BinaryMask& mask) {
  Contour c;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (is_boundary_pixel(mask, x, y)) c.points.push_back({x, y});
    }
  }
  return c;
}

/// Outer boundary: holes are filled first so only the exterior edge remains.
inline Contour outer_boundary(const BinaryMask& mask) {
  detail::require_nonempty(mask, "outer_boundary");
  return boundary_pixels(fill_holes(mask));
}

inline BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "mask_and: shapes differ");
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = (a.data()[i] && b.data()[i]) ? 1 : 0;
  return out;
}

/// Threshold rule for masks loaded from 8-bit images.
inline BinaryMask mask_from_gray(const GrayImage& img, std::uint8_t threshold = 128) {
  BinaryMask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out.data()[i] = img.data()[i] >= threshold ? 1 : 0;
  return out;
}

inline GrayImage gray_from_mask(const BinaryMask& mask) {
  GrayImage out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out.data()[i] = mask.data()[i] ? 255 : 0;
  return out;
}

}  // namespace pupilshape
