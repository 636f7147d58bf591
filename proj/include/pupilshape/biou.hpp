#pragma once

#include <cstddef>

#include "pupilshape/band.hpp"
#include "pupilshape/error.hpp"
#include "pupilshape/raster.hpp"

namespace pupilshape {

inline constexpr int kDefaultBandWidth = 4;

struct BiouScore {
  double value = 0.0;
  int d = 0;
  std::size_t intersection_px = 0;
  std::size_t union_px = 0;
};

/// Mask pixels that lie within distance d of the mask's own boundary
/// (M_d intersected with M). An empty mask contributes nothing.
inline BinaryMask band_restricted(const BinaryMask& mask, int d) {
  if (is_empty(mask)) return BinaryMask(mask.width(), mask.height());
  return mask_and(boundary_band(mask, d).band, mask);
}

/// Boundary IoU |(F_d ∩ F) ∩ (P_d ∩ P)| / |(F_d ∩ F) ∪ (P_d ∩ P)|.
inline BiouScore biou(const BinaryMask& fitted, const BinaryMask& predicted, int d = kDefaultBandWidth) {
  if (!fitted.same_shape(predicted)) {
    throw Error(ErrorCode::DimensionMismatch, "biou: mask dimensions differ");
  }
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "biou: d must be >= 1");
  const BinaryMask f = band_restricted(fitted, d);
  const BinaryMask p = band_restricted(predicted, d);
  BiouScore score;
  score.d = d;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool in_f = f.data()[i] != 0;
    const bool in_p = p.data()[i] != 0;
    score.intersection_px += (in_f && in_p) ? 1 : 0;
    score.union_px += (in_f || in_p) ? 1 : 0;
  }
  if (score.union_px == 0) throw Error(ErrorCode::BothEmpty, "biou: both band-restricted masks are empty");
  score.value = static_cast<double>(score.intersection_px) / static_cast<double>(score.union_px);
  return score;
}

inline double iou(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "iou: mask dimensions differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in_a = a.data()[i] != 0;
    const bool in_b = b.data()[i] != 0;
    inter += (in_a && in_b) ? 1 : 0;
    uni += (in_a || in_b) ? 1 : 0;
  }
  if (uni == 0) throw Error(ErrorCode::BothEmpty, "iou: both masks are empty");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Smallest band width that covers any raster of this size.
inline int saturating_band_width(int width, int height) {
  int d = 1;
  while (static_cast<long long>(d) * d < static_cast<long long>(width) * width +
                                              static_cast<long long>(height) * height) {
    ++d;
  }
  return d;
}

}  // namespace pupilshape
