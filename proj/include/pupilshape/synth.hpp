#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pupilshape/ellipse.hpp"
#include "pupilshape/error.hpp"
#include "pupilshape/eval.hpp"
#include "pupilshape/image_io.hpp"
#include "pupilshape/manifest.hpp"
#include "pupilshape/raster.hpp"

namespace pupilshape {

/// Parameters of the seeded two-class mask corpus. "real" eyes are clean
/// ellipses; "gan" eyes get a sum of radial sinusoids added to the boundary.
struct SynthSpec {
  int n_per_class = 200;
  int width = 128;
  int height = 128;
  /// Semi-axis range, pixels.
  double axes_min = 15.0;
  double axes_max = 35.0;
  /// Amplitude range of each radial harmonic, pixels.
  double amplitude_min = 1.5;
  double amplitude_max = 3.0;
  /// Harmonic index range, cycles per revolution.
  int frequency_min = 3;
  int frequency_max = 8;
  int n_harmonics = 2;
  std::uint64_t seed = 20220523;

  void validate() const {
    auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
    if (n_per_class < 1) fail("n_per_class must be >= 1");
    if (width < 1 || height < 1) fail("raster dimensions must be positive");
    if (!(axes_min > 0.0) || !(axes_max >= axes_min)) fail("axes range must satisfy 0 < min <= max");
    if (!(amplitude_min >= 0.0) || !(amplitude_max >= amplitude_min)) {
      fail("amplitude range must satisfy 0 <= min <= max");
    }
    if (frequency_min < 1 || frequency_max < frequency_min) fail("frequency range must satisfy 1 <= min <= max");
    if (n_harmonics < 0) fail("n_harmonics must be >= 0");
    if (n_harmonics * amplitude_max >= axes_min) fail("perturbation could collapse the smallest pupil");
    const double reach = axes_max + n_harmonics * amplitude_max + 2.0;
    if (2.0 * reach > std::min(width, height)) fail("raster too small for the largest perturbed pupil");
  }
};

struct Harmonic {
  double amplitude = 0.0;
  int frequency = 1;
  double phase = 0.0;
};

/// Pixels whose centre lies within the radially perturbed ellipse
/// r(phi) = r_ellipse(phi) + sum_k a_k sin(k phi + phase_k), phi measured in
/// the ellipse frame. No harmonics gives the clean ellipse.
inline BinaryMask rasterize_perturbed_ellipse(const EllipseGeometry& g, const std::vector<Harmonic>& harmonics,
                                              int width, int height) {
  BinaryMask out(width, height);
  const double cs = std::cos(g.rotation);
  const double sn = std::sin(g.rotation);
  const double A = g.semi_major;
  const double B = g.semi_minor;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x + 0.5 - g.center.x;
      const double dy = y + 0.5 - g.center.y;
      const double u = dx * cs + dy * sn;
      const double v = -dx * sn + dy * cs;
      const double rho = std::hypot(u, v);
      const double phi = std::atan2(v, u);
      double r = A * B / std::hypot(B * std::cos(phi), A * std::sin(phi));
      for (const Harmonic& h : harmonics) r += h.amplitude * std::sin(h.frequency * phi + h.phase);
      if (rho < r) out(x, y) = 1;
    }
  }
  return out;
}

struct SynthEye {
  EllipseGeometry geometry;
  std::vector<Harmonic> harmonics;
  BinaryMask mask;
};

struct SynthFace {
  std::string face_id;
  Label label = Label::Real;
  SynthEye left;
  SynthEye right;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Distribution objects in <random> are implementation-defined; these are not.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

inline SynthEye make_synth_eye(const SynthSpec& spec, SynthRng& rng, bool perturbed) {
  SynthEye eye;
  const double r1 = rng.uniform(spec.axes_min, spec.axes_max);
  const double r2 = rng.uniform(spec.axes_min, spec.axes_max);
  eye.geometry.semi_major = std::max(r1, r2);
  eye.geometry.semi_minor = std::min(r1, r2);
  eye.geometry.rotation = rng.uniform(0.0, std::numbers::pi);
  // Harmonics are always drawn so both classes consume the same random stream.
  std::vector<Harmonic> harmonics(static_cast<std::size_t>(spec.n_harmonics));
  for (Harmonic& h : harmonics) {
    h.amplitude = rng.uniform(spec.amplitude_min, spec.amplitude_max);
    h.frequency = rng.uniform_int(spec.frequency_min, spec.frequency_max);
    h.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  double reach = eye.geometry.semi_major + 2.0;
  if (perturbed) {
    for (const Harmonic& h : harmonics) reach += h.amplitude;
    eye.harmonics = std::move(harmonics);
  }
  eye.geometry.center.x = rng.uniform(reach, spec.width - reach);
  eye.geometry.center.y = rng.uniform(reach, spec.height - reach);
  eye.mask = rasterize_perturbed_ellipse(eye.geometry, eye.harmonics, spec.width, spec.height);
  return eye;
}

inline std::string face_name(Label label, int index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return std::string(to_string(label)) + "_" + digits;
}

}  // namespace detail

/// One face; each face draws from its own stream derived from (seed, label,
/// index), so any subset can be regenerated independently.
inline SynthFace make_synth_face(const SynthSpec& spec, Label label, int index) {
  const std::uint64_t stream =
      detail::splitmix64(spec.seed ^ detail::splitmix64((label == Label::Gan ? 1ULL << 32 : 0ULL) +
                                                        static_cast<std::uint64_t>(index)));
  detail::SynthRng rng(stream);
  SynthFace face;
  face.face_id = detail::face_name(label, index);
  face.label = label;
  const bool perturbed = label == Label::Gan;
  face.left = detail::make_synth_eye(spec, rng, perturbed);
  face.right = detail::make_synth_eye(spec, rng, perturbed);
  return face;
}

/// All real faces followed by all gan faces.
inline std::vector<SynthFace> generate_synth_faces(const SynthSpec& spec) {
  spec.validate();
  std::vector<SynthFace> faces;
  faces.reserve(2 * static_cast<std::size_t>(spec.n_per_class));
  for (Label label : {Label::Real, Label::Gan}) {
    for (int i = 0; i < spec.n_per_class; ++i) faces.push_back(make_synth_face(spec, label, i));
  }
  return faces;
}

/// Writes masks/<face>_L.pgm, masks/<face>_R.pgm and manifest.csv under
/// `outdir`; returns the manifest path.
inline std::filesystem::path write_synth_corpus(const SynthSpec& spec, const std::filesystem::path& outdir) {
  const std::vector<SynthFace> faces = generate_synth_faces(spec);
  std::error_code ec;
  std::filesystem::create_directories(outdir / "masks", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + (outdir / "masks").string());
  std::vector<ManifestEntry> entries;
  for (const SynthFace& f : faces) {
    ManifestEntry e;
    e.face_id = f.face_id;
    e.label = f.label;
    e.left_path = "masks/" + f.face_id + "_L.pgm";
    e.right_path = "masks/" + f.face_id + "_R.pgm";
    write_mask((outdir / e.left_path).string(), f.left.mask);
    write_mask((outdir / e.right_path).string(), f.right.mask);
    entries.push_back(std::move(e));
  }
  const std::filesystem::path manifest = outdir / "manifest.csv";
  write_text_file(manifest, format_manifest(entries));
  return manifest;
}

}  // namespace pupilshape
