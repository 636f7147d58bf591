#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pupilshape/error.hpp"
#include "pupilshape/raster.hpp"

namespace pupilshape {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Implicit conic a x^2 + b xy + c y^2 + d x + e y + f = 0, coefficients
/// stored as theta = [a, b, c, d, e, f].
struct ConicParams {
  std::array<double, 6> theta{};

  double a() const noexcept { return theta[0]; }
  double b() const noexcept { return theta[1]; }
  double c() const noexcept { return theta[2]; }
  double d() const noexcept { return theta[3]; }
  double e() const noexcept { return theta[4]; }
  double f() const noexcept { return theta[5]; }

  /// Algebraic distance F(u; theta) at (x, y).
  double operator()(double x, double y) const noexcept {
    return theta[0] * x * x + theta[1] * x * y + theta[2] * y * y + theta[3] * x + theta[4] * y +
           theta[5];
  }

  /// 4ac - b^2; positive exactly when the quadratic part is elliptic.
  double ellipse_constraint() const noexcept { return 4.0 * theta[0] * theta[2] - theta[1] * theta[1]; }

  /// Rescales into the gauge 4ac - b^2 = 1 with a > 0.
  ConicParams normalized() const {
    const double cond = ellipse_constraint();
    if (!(cond > 0.0) || !std::isfinite(cond)) {
      throw Error(ErrorCode::NotAnEllipse, "conic discriminant b^2 - 4ac is not negative");
    }
    double k = 1.0 / std::sqrt(cond);
    if (theta[0] < 0.0) k = -k;
    ConicParams out;
    for (std::size_t i = 0; i < 6; ++i) out.theta[i] = theta[i] * k;
    return out;
  }
};

struct EllipseGeometry {
  Point2 center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  /// Angle of the major axis from +x, in [0, pi).
  double rotation = 0.0;
};

struct FitReport {
  ConicParams conic;
  EllipseGeometry geometry;
  double rms_algebraic_distance = 0.0;
  std::size_t n_points = 0;
};

inline double wrap_half_turn(double angle) {
  angle = std::fmod(angle, std::numbers::pi);
  if (angle < 0.0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi) angle -= std::numbers::pi;
  return angle;
}

inline EllipseGeometry conic_to_geometry(const ConicParams& conic) {
  const ConicParams n = conic.normalized();
  const double a = n.a(), b = n.b(), c = n.c(), d = n.d(), e = n.e(), f = n.f();

  // Gradient zero; the determinant 4ac - b^2 is 1 in this gauge.
  const double cx = b * e - 2.0 * c * d;
  const double cy = b * d - 2.0 * a * e;
  const double f0 = f + 0.5 * (d * cx + e * cy);

  const double mean = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), 0.5 * b);
  const double lambda_max = mean + r;
  const double lambda_min = 0.25 / lambda_max;  // product of eigenvalues is (4ac - b^2) / 4

  if (!(f0 < 0.0)) throw Error(ErrorCode::NotAnEllipse, "conic has no real points");

  EllipseGeometry g;
  g.center = {cx, cy};
  g.semi_major = std::sqrt(-f0 / lambda_min);
  g.semi_minor = std::sqrt(-f0 / lambda_max);
  g.rotation = (b == 0.0 && a == c) ? 0.0 : wrap_half_turn(0.5 * std::atan2(b, a - c) + 0.5 * std::numbers::pi);
  return g;
}

inline ConicParams geometry_to_conic(const EllipseGeometry& g) {
  if (!(g.semi_major > 0.0) || !(g.semi_minor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
  }
  const double cs = std::cos(g.rotation);
  const double sn = std::sin(g.rotation);
  const double inv_a2 = 1.0 / (g.semi_major * g.semi_major);
  const double inv_b2 = 1.0 / (g.semi_minor * g.semi_minor);
  const double a = cs * cs * inv_a2 + sn * sn * inv_b2;
  const double b = 2.0 * cs * sn * (inv_a2 - inv_b2);
  const double c = sn * sn * inv_a2 + cs * cs * inv_b2;
  const double cx = g.center.x;
  const double cy = g.center.y;
  ConicParams conic;
  conic.theta = {a, b, c, -2.0 * a * cx - b * cy, -b * cx - 2.0 * c * cy,
                 a * cx * cx + b * cx * cy + c * cy * cy - 1.0};
  return conic.normalized();
}

inline Point2 point_on_ellipse(const EllipseGeometry& g, double t) {
  const double cs = std::cos(g.rotation);
  const double sn = std::sin(g.rotation);
  const double u = g.semi_major * std::cos(t);
  const double v = g.semi_minor * std::sin(t);
  return {g.center.x + u * cs - v * sn, g.center.y + u * sn + v * cs};
}

inline double algebraic_ssd(const ConicParams& conic, std::span<const Point2> points) {
  double ssd = 0.0;
  for (const Point2& p : points) {
    const double r = conic(p.x, p.y);
    ssd += r * r;
  }
  return ssd;
}

/// Continuous coordinates of pixel centres (x + 0.5, y + 0.5).
inline std::vector<Point2> pixel_centers(const Contour& contour) {
  std::vector<Point2> out;
  out.reserve(contour.size());
  for (const Pixel& p : contour.points) out.push_back({p.x + 0.5, p.y + 0.5});
  return out;
}

namespace detail {

struct NormalizedPoints {
  std::vector<Point2> pts;
  double mx = 0.0;
  double my = 0.0;
  double scale = 1.0;  // RMS distance to the centroid
};

/// Sorts into canonical order, rejects point sets that cannot pin down a
/// conic, and computes the centring/scaling used by the fit.
inline NormalizedPoints checked_points(std::span<const Point2> input) {
  // Canonical order makes the result bit-identical under any permutation.
  std::vector<Point2> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end(), [](const Point2& l, const Point2& r) {
    return l.x < r.x || (l.x == r.x && l.y < r.y);
  });
  std::size_t n_distinct = pts.empty() ? 0 : 1;
  for (std::size_t i = 1; i < pts.size(); ++i) n_distinct += (pts[i] == pts[i - 1]) ? 0 : 1;
  if (n_distinct < 5) {
    throw Error(ErrorCode::DegenerateInput,
                "need at least 5 distinct points, got " + std::to_string(n_distinct));
  }
  for (const Point2& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::DegenerateInput, "non-finite point coordinate");
    }
  }
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const Point2& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;

  Eigen::MatrixX2d centered(pts.size(), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    centered(static_cast<Eigen::Index>(i), 0) = pts[i].x - mx;
    centered(static_cast<Eigen::Index>(i), 1) = pts[i].y - my;
  }
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::MatrixX2d>(centered).singularValues();
  if (!(sv(0) > 0.0) || sv(1) < 1e-9 * sv(0)) {
    throw Error(ErrorCode::DegenerateInput, "points are collinear");
  }
  return {std::move(pts), mx, my, centered.norm() / std::sqrt(n)};
}

}  // namespace detail

/// Direct least-squares ellipse fit: minimises the summed squared algebraic
/// distance subject to 4ac - b^2 = 1, solved through the reduced 3x3
/// eigenproblem of the block-eliminated scatter matrix.
inline FitReport fit_ellipse(std::span<const Point2> input) {
  const auto [pts, mx, my, scale] = detail::checked_points(input);

  Eigen::Matrix3d s1 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d s2 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d s3 = Eigen::Matrix3d::Zero();
  for (const Point2& p : pts) {
    const double x = (p.x - mx) / scale;
    const double y = (p.y - my) / scale;
    const Eigen::Vector3d quad(x * x, x * y, y * y);
    const Eigen::Vector3d lin(x, y, 1.0);
    s1 += quad * quad.transpose();
    s2 += quad * lin.transpose();
    s3 += lin * lin.transpose();
  }

  // Linear coefficients are the least-squares response to the quadratic ones.
  const Eigen::Matrix3d t = -s3.ldlt().solve(s2.transpose());
  const Eigen::Matrix3d m = s1 + s2 * t;
  // Premultiply by the inverse of the 3x3 constraint block [[0,0,2],[0,-1,0],[2,0,0]].
  Eigen::Matrix3d reduced;
  reduced.row(0) = m.row(2) / 2.0;
  reduced.row(1) = -m.row(1);
  reduced.row(2) = m.row(0) / 2.0;

  const Eigen::EigenSolver<Eigen::Matrix3d> solver(reduced);
  std::array<double, 6> best{};
  double best_ssd = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3cd vc = solver.eigenvectors().col(k);
    if (vc.imag().norm() > 1e-9 * vc.real().norm()) continue;
    Eigen::Vector3d quad = vc.real();
    const double cond = 4.0 * quad(0) * quad(2) - quad(1) * quad(1);
    if (!(cond > 0.0)) continue;
    quad /= std::sqrt(cond);
    const Eigen::Vector3d lin = t * quad;
    double ssd = 0.0;
    for (const Point2& p : pts) {
      const double x = (p.x - mx) / scale;
      const double y = (p.y - my) / scale;
      const double r = quad(0) * x * x + quad(1) * x * y + quad(2) * y * y + lin(0) * x + lin(1) * y + lin(2);
      ssd += r * r;
    }
    if (ssd < best_ssd) {
      best_ssd = ssd;
      best = {quad(0), quad(1), quad(2), lin(0), lin(1), lin(2)};
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::NoEllipseSolution, "no eigenvector satisfies 4ac - b^2 > 0");

  // Undo x' = (x - mx) / s; multiplying through by s^2 keeps a, b, c.
  const auto [a, b, c, d1, e1, f1] = best;
  const double s = scale;
  ConicParams raw;
  raw.theta = {a,
               b,
               c,
               -2.0 * a * mx - b * my + d1 * s,
               -b * mx - 2.0 * c * my + e1 * s,
               a * mx * mx + b * mx * my + c * my * my - d1 * s * mx - e1 * s * my + f1 * s * s};

  FitReport report;
  report.conic = raw.normalized();
  report.geometry = conic_to_geometry(report.conic);
  report.n_points = pts.size();
  report.rms_algebraic_distance = std::sqrt(algebraic_ssd(report.conic, pts) / static_cast<double>(pts.size()));
  return report;
}

inline FitReport fit_ellipse(const Contour& contour) {
  const std::vector<Point2> centers = pixel_centers(contour);
  return fit_ellipse(std::span<const Point2>(centers));
}

/// Midpoints of the pixel edges between the hole-filled mask and background
/// (or the raster border): the region's outline rather than its rim-pixel centres.
inline std::vector<Point2> outer_edge_points(const BinaryMask& mask) {
  const BinaryMask filled = fill_holes(mask);
  auto bg = [&](int x, int y) { return !filled.contains(x, y) || filled(x, y) == 0; };
  std::vector<Point2> out;
  for (int y = 0; y < filled.height(); ++y) {
    for (int x = 0; x < filled.width(); ++x) {
      if (filled(x, y) == 0) continue;
      if (bg(x - 1, y)) out.push_back({static_cast<double>(x), y + 0.5});
      if (bg(x + 1, y)) out.push_back({x + 1.0, y + 0.5});
      if (bg(x, y - 1)) out.push_back({x + 0.5, static_cast<double>(y)});
      if (bg(x, y + 1)) out.push_back({x + 0.5, y + 1.0});
    }
  }
  return out;
}

/// Ellipse fit to a mask's outer outline. The rim pixels (outer_boundary) must
/// form a usable point set on their own; the fit uses the edge midpoints, which
/// sit on the region boundary instead of half a pixel inside it.
inline FitReport fit_outer_boundary(const BinaryMask& mask) {
  detail::checked_points(pixel_centers(outer_boundary(mask)));
  const std::vector<Point2> edges = outer_edge_points(mask);
  return fit_ellipse(std::span<const Point2>(edges));
}

namespace detail {

template <class Inside>
BinaryMask rasterize_in_box(const EllipseGeometry& g, int width, int height, Inside inside) {
  BinaryMask out(width, height);
  const double cs = std::cos(g.rotation);
  const double sn = std::sin(g.rotation);
  const double hx = std::hypot(g.semi_major * cs, g.semi_minor * sn);
  const double hy = std::hypot(g.semi_major * sn, g.semi_minor * cs);
  auto clamp_index = [](double v, int hi) {
    return static_cast<int>(std::clamp(v, -1.0, static_cast<double>(hi)));
  };
  const int x0 = std::max(0, clamp_index(std::floor(g.center.x - hx) - 1.0, width));
  const int x1 = std::min(width - 1, clamp_index(std::ceil(g.center.x + hx) + 1.0, width));
  const int y0 = std::max(0, clamp_index(std::floor(g.center.y - hy) - 1.0, height));
  const int y1 = std::min(height - 1, clamp_index(std::ceil(g.center.y + hy) + 1.0, height));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (inside(x + 0.5, y + 0.5)) out(x, y) = 1;
    }
  }
  return out;
}

}  // namespace detail

/// Foreground = pixels whose centre lies strictly inside the conic (F has the
/// sign it takes at the ellipse centre).
inline BinaryMask rasterize_conic(const ConicParams& conic, int width, int height) {
  const ConicParams n = conic.normalized();
  return detail::rasterize_in_box(conic_to_geometry(n), width, height,
                                  [&](double x, double y) { return n(x, y) < 0.0; });
}

/// Same rule evaluated in the ellipse frame, which stays accurate far from the origin.
inline BinaryMask rasterize_ellipse(const EllipseGeometry& g, int width, int height) {
  if (!(g.semi_minor > 0.0) || !(g.semi_major > 0.0)) {
    throw Error(ErrorCode::NotAnEllipse, "semi-axes must be positive");
  }
  const double cs = std::cos(g.rotation);
  const double sn = std::sin(g.rotation);
  return detail::rasterize_in_box(g, width, height, [&](double x, double y) {
    const double dx = x - g.center.x;
    const double dy = y - g.center.y;
    const double u = (dx * cs + dy * sn) / g.semi_major;
    const double v = (-dx * sn + dy * cs) / g.semi_minor;
    return u * u + v * v < 1.0;
  });
}

}  // namespace pupilshape
