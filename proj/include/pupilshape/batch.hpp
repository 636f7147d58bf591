#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "pupilshape/biou.hpp"
#include "pupilshape/eval.hpp"
#include "pupilshape/image_io.hpp"
#include "pupilshape/manifest.hpp"
#include "pupilshape/pipeline.hpp"

namespace pupilshape {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

/// A face ready to score: labelled inputs for both eyes.
struct FaceInput {
  std::string face_id;
  Label label = Label::Unknown;
  PupilInput left;
  PupilInput right;
};

/// Masks are read with the >= 128 rule; crops stay grayscale for the
/// classical segmenter. Unreadable files are data errors.
inline PupilInput load_pupil_input(const std::string& path, const PipelineConfig& config) {
  if (path.empty()) return std::monostate{};
  GrayImage img = read_gray_image(path);
  if (config.segmenter == Segmenter::Classical) return img;
  return mask_from_gray(img);
}

inline std::vector<FaceInput> load_faces(const Manifest& manifest, const PipelineConfig& config, int jobs = 1) {
  std::vector<FaceInput> faces(manifest.entries.size());
  parallel_for(faces.size(), jobs, [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    faces[i].face_id = e.face_id;
    faces[i].label = e.label;
    faces[i].left = load_pupil_input(manifest.resolve(e.left_path), config);
    faces[i].right = load_pupil_input(manifest.resolve(e.right_path), config);
  });
  return faces;
}

struct PreparedFace {
  std::string face_id;
  Label label = Label::Unknown;
  PreparedPupil left;
  PreparedPupil right;
};

/// Segmentation and fitting, done once per face.
inline std::vector<PreparedFace> prepare_faces(std::span<const FaceInput> faces, const PipelineConfig& config,
                                               int jobs = 1) {
  config.validate();
  std::vector<PreparedFace> out(faces.size());
  parallel_for(faces.size(), jobs, [&](std::size_t i) {
    out[i].face_id = faces[i].face_id;
    out[i].label = faces[i].label;
    out[i].left = prepare_pupil(faces[i].left, Eye::Left, config);
    out[i].right = prepare_pupil(faces[i].right, Eye::Right, config);
  });
  return out;
}

inline std::vector<FaceScore> score_prepared(std::span<const PreparedFace> faces, int d,
                                             const PipelineConfig& config, int jobs = 1) {
  std::vector<FaceScore> out(faces.size());
  parallel_for(faces.size(), jobs, [&](std::size_t i) {
    out[i] = aggregate_face(faces[i].face_id, finish_pupil(faces[i].left, d), finish_pupil(faces[i].right, d),
                            config);
  });
  return out;
}

inline std::vector<FaceScore> score_faces(std::span<const FaceInput> faces, const PipelineConfig& config,
                                          int jobs = 1) {
  const std::vector<PreparedFace> prepared = prepare_faces(faces, config, jobs);
  return score_prepared(prepared, config.d, config, jobs);
}

/// Labelled faces with a defined aggregate; undecidable and unlabelled faces
/// carry no score and are left out of ROC analysis.
inline std::vector<LabeledScore> labeled_scores(std::span<const FaceInput> inputs,
                                                std::span<const FaceScore> scores) {
  std::vector<LabeledScore> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (inputs[i].label == Label::Unknown || !scores[i].aggregate) continue;
    out.push_back({scores[i].face_id, inputs[i].label, *scores[i].aggregate});
  }
  return out;
}

inline std::vector<LabeledScore> labeled_scores(std::span<const PreparedFace> prepared,
                                                std::span<const FaceScore> scores) {
  std::vector<LabeledScore> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (prepared[i].label == Label::Unknown || !scores[i].aggregate) continue;
    out.push_back({scores[i].face_id, prepared[i].label, *scores[i].aggregate});
  }
  return out;
}

struct SweepPoint {
  int d = 0;
  double auc = 0.0;
};

/// Detection AUC per band width. Fitting is shared; only the band stage
/// reruns for each d.
inline std::vector<SweepPoint> sweep_d(std::span<const FaceInput> faces, std::span<const int> d_values,
                                       const PipelineConfig& config, int jobs = 1) {
  if (d_values.empty()) throw Error(ErrorCode::InvalidArgument, "sweep_d needs at least one d value");
  for (int d : d_values) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "sweep_d: every d must be >= 1");
  }
  const std::vector<PreparedFace> prepared = prepare_faces(faces, config, jobs);
  std::vector<SweepPoint> out;
  for (int d : d_values) {
    const std::vector<FaceScore> scores = score_prepared(prepared, d, config, jobs);
    const std::vector<LabeledScore> labeled = labeled_scores(prepared, scores);
    out.push_back({d, auc_rank(labeled)});
  }
  return out;
}

/// Same aggregation as the pipeline but with plain IoU per eye.
inline double iou_auc(std::span<const PreparedFace> prepared, const PipelineConfig& config) {
  std::vector<LabeledScore> labeled;
  for (const PreparedFace& f : prepared) {
    if (f.label == Label::Unknown) continue;
    std::vector<double> values;
    for (const PreparedPupil* p : {&f.left, &f.right}) {
      if (p->status == PupilStatus::Ok) values.push_back(iou(p->fitted, p->predicted));
    }
    if (values.empty() || (config.require_both_eyes && values.size() < 2)) continue;
    const double agg = values.size() == 2 ? (values[0] + values[1]) / 2.0 : values[0];
    labeled.push_back({f.face_id, f.label, agg});
  }
  return auc_rank(labeled);
}

}  // namespace pupilshape
