#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pupilshape/error.hpp"
#include "pupilshape/raster.hpp"

namespace pupilshape {

namespace detail {

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher). `f` holds squared
// distances along one line, +inf where there is no site. Values are integers
// stored in doubles, so results are exact.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& out,
                   std::vector<int>& v, std::vector<double>& z) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(f.size());
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);
  out.assign(static_cast<std::size_t>(n), kInf);

  int k = -1;
  for (int q = 0; q < n; ++q) {
    const double fq = f[static_cast<std::size_t>(q)];
    if (fq == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      const double fp = f[static_cast<std::size_t>(p)];
      s = ((fq + double(q) * q) - (fp + double(p) * p)) / (2.0 * (q - p));
      // z[0] is -inf, so this never pops the last parabola.
      if (s > z[static_cast<std::size_t>(k)]) break;
      --k;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (k < 0) return;

  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    const double dq = double(q - p);
    out[static_cast<std::size_t>(q)] = dq * dq + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace detail

/// Exact squared Euclidean distance from every pixel to the nearest site
/// (nonzero pixel of `sites`). Pixels are +inf when there are no sites.
inline std::vector<double> squared_distance_transform(const BinaryMask& sites) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int w = sites.width();
  const int h = sites.height();
  std::vector<double> dist(sites.size(), kInf);
  std::vector<double> line, out, z;
  std::vector<int> v;

  line.resize(static_cast<std::size_t>(h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) line[static_cast<std::size_t>(y)] = sites(x, y) ? 0.0 : kInf;
    detail::edt_1d(line, out, v, z);
    for (int y = 0; y < h; ++y) dist[sites.index(x, y)] = out[static_cast<std::size_t>(y)];
  }
  line.resize(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) line[static_cast<std::size_t>(x)] = dist[sites.index(x, y)];
    detail::edt_1d(line, out, v, z);
    for (int x = 0; x < w; ++x) dist[sites.index(x, y)] = out[static_cast<std::size_t>(x)];
  }
  return dist;
}

/// Pixels within Euclidean distance `d` of a mask's outer boundary contour.
struct BoundaryBand {
  int d = 0;
  BinaryMask band;
};

inline BinaryMask contour_mask(const Contour& contour, int width, int height) {
  BinaryMask m(width, height);
  for (const Pixel& p : contour.points) m(p.x, p.y) = 1;
  return m;
}

inline BoundaryBand boundary_band(const BinaryMask& mask, int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "boundary_band: d must be >= 1");
  const Contour contour = outer_boundary(mask);
  const std::vector<double> dist =
      squared_distance_transform(contour_mask(contour, mask.width(), mask.height()));
  const double limit = double(d) * double(d);
  BoundaryBand result{d, BinaryMask(mask.width(), mask.height())};
  for (std::size_t i = 0; i < dist.size(); ++i) result.band.data()[i] = dist[i] <= limit ? 1 : 0;
  return result;
}

}  // namespace pupilshape
