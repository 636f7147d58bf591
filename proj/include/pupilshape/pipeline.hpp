#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "pupilshape/biou.hpp"
#include "pupilshape/ellipse.hpp"
#include "pupilshape/error.hpp"
#include "pupilshape/raster.hpp"
#include "pupilshape/segment.hpp"

namespace pupilshape {

enum class Segmenter { ExternalMask, Classical };
enum class Eye { Left, Right };
enum class PupilStatus { Ok, SegmentationFailed, FitFailed, Missing };
enum class Verdict { Real, GanSuspect, Undecidable };

constexpr std::string_view to_string(Segmenter s) {
  return s == Segmenter::Classical ? "classical" : "external_mask";
}
constexpr std::string_view to_string(Eye e) { return e == Eye::Left ? "left" : "right"; }
constexpr std::string_view to_string(PupilStatus s) {
  switch (s) {
    case PupilStatus::Ok: return "ok";
    case PupilStatus::SegmentationFailed: return "segmentation_failed";
    case PupilStatus::FitFailed: return "fit_failed";
    case PupilStatus::Missing: return "missing";
  }
  return "unknown";
}
constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Real: return "real";
    case Verdict::GanSuspect: return "gan_suspect";
    case Verdict::Undecidable: return "undecidable";
  }
  return "unknown";
}

inline Segmenter parse_segmenter(std::string_view s) {
  if (s == "classical") return Segmenter::Classical;
  if (s == "external_mask") return Segmenter::ExternalMask;
  throw Error(ErrorCode::InvalidArgument, "unknown segmenter '" + std::string(s) + "'");
}

struct PipelineConfig {
  int d = kDefaultBandWidth;
  double threshold = 0.85;
  Segmenter segmenter = Segmenter::ExternalMask;
  int min_pupil_area = 25;
  bool require_both_eyes = false;
  /// Only used when segmenter is Classical; its min_area is overridden by
  /// min_pupil_area.
  SegmenterConfig classical;

  void validate() const {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "d must be >= 1");
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
    }
    if (min_pupil_area < 0) throw Error(ErrorCode::InvalidArgument, "min_pupil_area must be >= 0");
  }
};

/// No input (missing eye), a ready-made pupil mask, or an eye crop.
using PupilInput = std::variant<std::monostate, BinaryMask, GrayImage>;

struct PupilScore {
  Eye eye = Eye::Left;
  PupilStatus status = PupilStatus::Missing;
  std::optional<BiouScore> biou;
  std::optional<FitReport> fit;
  /// Why a non-ok status was assigned.
  std::string detail;
};

/// Everything upstream of the band stage; reused across band widths.
struct PreparedPupil {
  Eye eye = Eye::Left;
  PupilStatus status = PupilStatus::Missing;
  std::string detail;
  std::optional<FitReport> fit;
  BinaryMask predicted;
  BinaryMask fitted;
};

struct FaceScore {
  std::string face_id;
  PupilScore left;
  PupilScore right;
  std::optional<double> aggregate;
  Verdict verdict = Verdict::Undecidable;
};

inline PreparedPupil prepare_pupil(const PupilInput& input, Eye eye, const PipelineConfig& config) {
  PreparedPupil out;
  out.eye = eye;
  if (std::holds_alternative<std::monostate>(input)) {
    out.detail = "no input";
    return out;
  }

  BinaryMask raw;
  if (const auto* crop = std::get_if<GrayImage>(&input)) {
    if (config.segmenter == Segmenter::Classical) {
      SegmenterConfig seg = config.classical;
      seg.min_area = config.min_pupil_area;
      try {
        raw = segment_pupil_classical(*crop, seg);
      } catch (const Error& e) {
        out.status = PupilStatus::SegmentationFailed;
        out.detail = e.what();
        return out;
      }
    } else {
      raw = mask_from_gray(*crop);
    }
  } else {
    raw = std::get<BinaryMask>(input);
  }

  if (is_empty(raw)) {
    out.status = PupilStatus::SegmentationFailed;
    out.detail = "EmptyMask: mask has no foreground pixel";
    return out;
  }
  out.predicted = fill_holes(largest_component(raw));
  const std::size_t area = foreground_count(out.predicted);
  if (area < static_cast<std::size_t>(config.min_pupil_area)) {
    out.status = PupilStatus::SegmentationFailed;
    out.detail = "pupil area " + std::to_string(area) + " below minimum " +
                 std::to_string(config.min_pupil_area);
    return out;
  }

  try {
    out.fit = fit_outer_boundary(out.predicted);
    out.fitted = rasterize_conic(out.fit->conic, out.predicted.width(), out.predicted.height());
  } catch (const Error& e) {
    out.fit.reset();
    out.status = PupilStatus::FitFailed;
    out.detail = e.what();
    return out;
  }
  out.status = PupilStatus::Ok;
  return out;
}

/// Band stage: BIoU between the fitted-ellipse mask and the predicted mask.
inline PupilScore finish_pupil(const PreparedPupil& prepared, int d) {
  PupilScore score;
  score.eye = prepared.eye;
  score.status = prepared.status;
  score.detail = prepared.detail;
  if (prepared.status != PupilStatus::Ok) return score;
  score.fit = prepared.fit;
  score.biou = biou(prepared.fitted, prepared.predicted, d);
  return score;
}

inline PupilScore score_pupil(const PupilInput& input, const PipelineConfig& config, Eye eye = Eye::Left) {
  config.validate();
  return finish_pupil(prepare_pupil(input, eye, config), config.d);
}

/// Mean BIoU over the eyes that scored, thresholded into a verdict.
inline FaceScore aggregate_face(std::string face_id, PupilScore left, PupilScore right,
                                const PipelineConfig& config) {
  FaceScore face;
  face.face_id = std::move(face_id);
  face.left = std::move(left);
  face.right = std::move(right);

  const bool left_ok = face.left.status == PupilStatus::Ok;
  const bool right_ok = face.right.status == PupilStatus::Ok;
  if (left_ok && right_ok) {
    face.aggregate = (face.left.biou->value + face.right.biou->value) / 2.0;
  } else if (!config.require_both_eyes && (left_ok || right_ok)) {
    face.aggregate = left_ok ? face.left.biou->value : face.right.biou->value;
  }

  if (!face.aggregate) {
    face.verdict = Verdict::Undecidable;
  } else {
    face.verdict = *face.aggregate >= config.threshold ? Verdict::Real : Verdict::GanSuspect;
  }
  return face;
}

inline FaceScore score_face(std::string face_id, const PupilInput& left, const PupilInput& right,
                            const PipelineConfig& config) {
  config.validate();
  return aggregate_face(std::move(face_id), score_pupil(left, config, Eye::Left),
                        score_pupil(right, config, Eye::Right), config);
}

}  // namespace pupilshape
