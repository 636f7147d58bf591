#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pupilshape/error.hpp"
#include "pupilshape/raster.hpp"

namespace pupilshape {

// 3x3 square structuring element. Out-of-raster neighbours are ignored, so the
// raster border neither erodes nor dilates the mask.
inline BinaryMask erode3x3(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      std::uint8_t v = 1;
      for (int dy = -1; dy <= 1 && v; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (mask.contains(x + dx, y + dy) && !mask(x + dx, y + dy)) {
            v = 0;
            break;
          }
        }
      }
      out(x, y) = v;
    }
  }
  return out;
}

inline BinaryMask dilate3x3(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      std::uint8_t v = 0;
      for (int dy = -1; dy <= 1 && !v; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (mask.contains(x + dx, y + dy) && mask(x + dx, y + dy)) {
            v = 1;
            break;
          }
        }
      }
      out(x, y) = v;
    }
  }
  return out;
}

inline BinaryMask open3x3(const BinaryMask& mask) { return dilate3x3(erode3x3(mask)); }
inline BinaryMask close3x3(const BinaryMask& mask) { return erode3x3(dilate3x3(mask)); }

struct SegmenterConfig {
  /// Fraction of the darkest pixels kept by the initial threshold.
  double dark_fraction = 0.08;
  int min_area = 25;
  /// Reject when at least this fraction of the crop border is foreground.
  double max_border_fraction = 0.5;
};

/// Intensity at the given lower quantile; pixels <= this value are "dark".
inline std::uint8_t dark_threshold(const GrayImage& eye, double fraction) {
  std::vector<std::uint8_t> values = eye.data();
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(fraction * n)) - 1;
  rank = std::clamp<std::ptrdiff_t>(rank, 0, static_cast<std::ptrdiff_t>(values.size()) - 1);
  std::nth_element(values.begin(), values.begin() + rank, values.end());
  return values[static_cast<std::size_t>(rank)];
}

inline double border_foreground_fraction(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::size_t total = 0;
  std::size_t hit = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x != 0 && y != 0 && x != w - 1 && y != h - 1) continue;
      ++total;
      hit += mask(x, y) ? 1 : 0;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

/// Classical pupil segmenter for eye crops: dark-quantile threshold, 3x3
/// opening then closing, largest component, hole filling.
inline BinaryMask segment_pupil_classical(const GrayImage& eye, const SegmenterConfig& config = {}) {
  if (!(config.dark_fraction > 0.0 && config.dark_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dark_fraction must be in (0, 1]");
  }
  const std::uint8_t t = dark_threshold(eye, config.dark_fraction);
  BinaryMask dark(eye.width(), eye.height());
  for (std::size_t i = 0; i < eye.size(); ++i) dark.data()[i] = eye.data()[i] <= t ? 1 : 0;

  const BinaryMask cleaned = close3x3(open3x3(dark));
  if (is_empty(cleaned)) {
    throw Error(ErrorCode::SegmentationFailed, "no dark region survives morphology");
  }
  BinaryMask pupil = fill_holes(largest_component(cleaned));

  const std::size_t area = foreground_count(pupil);
  if (area < static_cast<std::size_t>(std::max(config.min_area, 0))) {
    throw Error(ErrorCode::SegmentationFailed,
                "pupil area " + std::to_string(area) + " below minimum " + std::to_string(config.min_area));
  }
  if (border_foreground_fraction(pupil) >= config.max_border_fraction) {
    throw Error(ErrorCode::SegmentationFailed, "candidate region covers the crop border");
  }
  return pupil;
}

}  // namespace pupilshape
