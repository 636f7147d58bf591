#pragma once

#include <set>
#include <string>

#include "json.hpp"

#include "pupilshape/biou.hpp"
#include "pupilshape/ellipse.hpp"
#include "pupilshape/error.hpp"
#include "pupilshape/pipeline.hpp"
#include "pupilshape/synth.hpp"

namespace pupilshape {

/// Insertion-ordered so emitted field order is stable.
using Json = nlohmann::ordered_json;

inline Json to_json(const FitReport& fit) {
  Json j;
  j["conic"] = fit.conic.theta;
  j["center"] = {fit.geometry.center.x, fit.geometry.center.y};
  j["semi_major"] = fit.geometry.semi_major;
  j["semi_minor"] = fit.geometry.semi_minor;
  j["rotation_rad"] = fit.geometry.rotation;
  j["rms"] = fit.rms_algebraic_distance;
  j["n_points"] = fit.n_points;
  return j;
}

inline Json to_json(const BiouScore& s) {
  Json j;
  j["value"] = s.value;
  j["d"] = s.d;
  j["intersection_px"] = s.intersection_px;
  j["union_px"] = s.union_px;
  return j;
}

inline Json to_json(const PupilScore& p) {
  Json j;
  j["eye"] = to_string(p.eye);
  j["status"] = to_string(p.status);
  j["biou"] = p.biou ? to_json(*p.biou) : Json(nullptr);
  j["fit"] = p.fit ? to_json(*p.fit) : Json(nullptr);
  j["detail"] = p.detail;
  return j;
}

inline Json to_json(const FaceScore& f) {
  Json j;
  j["face_id"] = f.face_id;
  j["left"] = to_json(f.left);
  j["right"] = to_json(f.right);
  j["aggregate"] = f.aggregate ? Json(*f.aggregate) : Json(nullptr);
  j["verdict"] = to_string(f.verdict);
  return j;
}

inline Json to_json(const PipelineConfig& c) {
  Json j;
  j["d"] = c.d;
  j["threshold"] = c.threshold;
  j["segmenter"] = to_string(c.segmenter);
  j["min_pupil_area"] = c.min_pupil_area;
  j["require_both_eyes"] = c.require_both_eyes;
  j["dark_fraction"] = c.classical.dark_fraction;
  j["max_border_fraction"] = c.classical.max_border_fraction;
  return j;
}

inline Json to_json(const SynthSpec& s) {
  Json j;
  j["n_per_class"] = s.n_per_class;
  j["raster"] = {s.width, s.height};
  j["regular_axes_range"] = {s.axes_min, s.axes_max};
  j["perturb_amplitude_range"] = {s.amplitude_min, s.amplitude_max};
  j["perturb_frequency_range"] = {s.frequency_min, s.frequency_max};
  j["n_harmonics"] = s.n_harmonics;
  j["seed"] = s.seed;
  return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline SynthSpec synth_spec_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "synth spec must be a JSON object");
  static const std::set<std::string> kKeys = {"n_per_class",     "raster", "regular_axes_range",
                                              "perturb_amplitude_range", "perturb_frequency_range",
                                              "n_harmonics",     "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw Error(ErrorCode::InvalidSpec, "unknown synth spec key '" + key + "'");
  }
  SynthSpec s;
  try {
    auto pair = [&](const char* key, auto& lo, auto& hi) {
      if (!j.contains(key)) return;
      const Json& v = j.at(key);
      if (!v.is_array() || v.size() != 2) {
        throw Error(ErrorCode::InvalidSpec, std::string(key) + " must be a two-element array");
      }
      v.at(0).get_to(lo);
      v.at(1).get_to(hi);
    };
    if (j.contains("n_per_class")) j.at("n_per_class").get_to(s.n_per_class);
    pair("raster", s.width, s.height);
    pair("regular_axes_range", s.axes_min, s.axes_max);
    pair("perturb_amplitude_range", s.amplitude_min, s.amplitude_max);
    pair("perturb_frequency_range", s.frequency_min, s.frequency_max);
    if (j.contains("n_harmonics")) j.at("n_harmonics").get_to(s.n_harmonics);
    if (j.contains("seed")) j.at("seed").get_to(s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  s.validate();
  return s;
}

}  // namespace pupilshape
