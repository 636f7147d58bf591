#pragma once

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pupilshape/batch.hpp"
#include "pupilshape/error.hpp"
#include "pupilshape/eval.hpp"
#include "pupilshape/image_io.hpp"
#include "pupilshape/manifest.hpp"
#include "pupilshape/pipeline.hpp"
#include "pupilshape/segment.hpp"
#include "pupilshape/serialize.hpp"
#include "pupilshape/synth.hpp"

namespace pupilshape::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kEvaluation = 3 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return kUsage;
    case ErrorCode::OneClassOnly: return kEvaluation;
    default: return kData;
  }
}

inline void emit_error(std::ostream& err, std::string_view kind, const std::string& detail, int exit_code) {
  Json j;
  j["error"] = kind;
  j["detail"] = detail;
  j["exit_code"] = exit_code;
  err << j.dump() << '\n';
}

namespace detail {

struct PipelineFlags {
  PipelineConfig config;
  std::string segmenter = "external_mask";
  int jobs = 1;

  void attach(CLI::App* cmd, bool with_jobs, bool with_d = true) {
    if (with_d) cmd->add_option("--d", config.d, "Boundary band width in pixels")->capture_default_str();
    cmd->add_option("--threshold", config.threshold, "Aggregate BIoU at or above which a face is real")
        ->capture_default_str();
    cmd->add_option("--segmenter", segmenter, "external_mask or classical")
        ->check(CLI::IsMember({"external_mask", "classical"}))
        ->capture_default_str();
    cmd->add_option("--min-area", config.min_pupil_area, "Minimum pupil area in pixels")->capture_default_str();
    cmd->add_flag("--require-both-eyes", config.require_both_eyes, "Undecidable unless both pupils score");
    cmd->add_option("--dark-fraction", config.classical.dark_fraction,
                    "Classical segmenter: darkest fraction of pixels kept")
        ->capture_default_str();
    if (with_jobs) cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  }

  PipelineConfig resolve() {
    config.segmenter = parse_segmenter(segmenter);
    config.validate();
    return config;
  }
};

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
}

}  // namespace detail

/// Entry point shared by the executable and the tests. Returns the process
/// exit code; results go to `out`, machine-readable errors to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pupil-shape regularity scoring for GAN-face screening", "pupilshape"};
  app.require_subcommand(1);

  // segment
  std::string seg_eye, seg_out;
  SegmenterConfig seg_config;
  auto* segment = app.add_subcommand("segment", "Classical pupil segmentation of one eye crop");
  segment->add_option("--eye", seg_eye, "Eye crop (PGM/PNG)")->required();
  segment->add_option("--out", seg_out, "Output mask (PGM)")->required();
  segment->add_option("--dark-fraction", seg_config.dark_fraction)->capture_default_str();
  segment->add_option("--min-area", seg_config.min_area)->capture_default_str();
  segment->add_option("--max-border-fraction", seg_config.max_border_fraction)->capture_default_str();

  // fit
  std::string fit_mask, fit_json;
  auto* fit = app.add_subcommand("fit", "Ellipse fit report for one pupil mask");
  fit->add_option("--mask", fit_mask, "Pupil mask (PGM/PNG)")->required();
  fit->add_option("--json", fit_json, "Output report path")->required();

  // score
  std::string score_left, score_right, score_id = "face";
  detail::PipelineFlags score_flags;
  auto* score = app.add_subcommand("score", "Score one face from its two eye inputs");
  score->add_option("--left", score_left, "Left eye mask or crop");
  score->add_option("--right", score_right, "Right eye mask or crop");
  score->add_option("--face-id", score_id, "Identifier echoed in the output")->capture_default_str();
  score_flags.attach(score, false);

  // evaluate
  std::string eval_manifest, eval_outdir;
  std::size_t eval_bins = 20;
  detail::PipelineFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "Score a manifest and emit ROC, histogram and metrics");
  evaluate->add_option("--manifest", eval_manifest, "CSV with face_id,label,left_path,right_path")->required();
  evaluate->add_option("--outdir", eval_outdir, "Directory for scores, ROC, histogram and metrics")->required();
  evaluate->add_option("--bins", eval_bins, "Histogram bins")->capture_default_str();
  eval_flags.attach(evaluate, true);

  // sweep-d
  std::string sweep_manifest, sweep_outdir;
  std::vector<int> sweep_values;
  detail::PipelineFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep-d", "Detection AUC as a function of band width");
  sweep->add_option("--manifest", sweep_manifest, "CSV with face_id,label,left_path,right_path")->required();
  sweep->add_option("--outdir", sweep_outdir, "Directory for sweep.csv and config.json")->required();
  sweep->add_option("--d", sweep_values, "Comma-separated band widths")->delimiter(',')->required();
  sweep_flags.attach(sweep, true, false);

  // synth
  std::string synth_spec_path, synth_outdir;
  auto* synth = app.add_subcommand("synth", "Generate the seeded synthetic mask corpus");
  synth->add_option("--spec", synth_spec_path, "Corpus spec JSON (defaults when omitted)");
  synth->add_option("--outdir", synth_outdir, "Directory for masks/, manifest.csv and synth_spec.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    emit_error(err, "UsageError", e.what(), kUsage);
    return kUsage;
  }

  try {
    if (*segment) {
      const GrayImage eye = read_gray_image(seg_eye);
      const BinaryMask mask = segment_pupil_classical(eye, seg_config);
      write_mask(seg_out, mask);
      Json j;
      j["command"] = "segment";
      j["eye"] = seg_eye;
      j["out"] = seg_out;
      j["area"] = foreground_count(mask);
      j["config"] = {{"dark_fraction", seg_config.dark_fraction},
                     {"min_area", seg_config.min_area},
                     {"max_border_fraction", seg_config.max_border_fraction}};
      out << j.dump(2) << '\n';
    } else if (*fit) {
      const BinaryMask raw = read_mask(fit_mask);
      if (is_empty(raw)) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixel: " + fit_mask);
      const FitReport report = fit_outer_boundary(largest_component(raw));
      Json j = to_json(report);
      j["mask"] = fit_mask;
      detail::write_json(fit_json, j);
      out << j.dump(2) << '\n';
    } else if (*score) {
      if (score_left.empty() && score_right.empty()) {
        throw Error(ErrorCode::InvalidArgument, "score needs --left and/or --right");
      }
      const PipelineConfig config = score_flags.resolve();
      const PupilInput left = load_pupil_input(score_left, config);
      const PupilInput right = load_pupil_input(score_right, config);
      Json j = to_json(score_face(score_id, left, right, config));
      j["config"] = to_json(config);
      out << j.dump(2) << '\n';
    } else if (*evaluate) {
      const PipelineConfig config = eval_flags.resolve();
      if (eval_bins < 2) throw Error(ErrorCode::InvalidArgument, "--bins must be >= 2");
      const std::filesystem::path dir(eval_outdir);
      detail::ensure_dir(dir);
      const Manifest manifest = read_manifest(eval_manifest);
      const std::vector<FaceInput> faces = load_faces(manifest, config, eval_flags.jobs);
      const std::vector<PreparedFace> prepared = prepare_faces(faces, config, eval_flags.jobs);
      const std::vector<FaceScore> scores = score_prepared(prepared, config.d, config, eval_flags.jobs);

      Json config_json = to_json(config);
      config_json["manifest"] = eval_manifest;
      config_json["bins"] = eval_bins;
      detail::write_json(dir / "config.json", config_json);

      std::ostringstream lines;
      std::size_t undecidable = 0;
      for (const FaceScore& s : scores) {
        lines << to_json(s).dump() << '\n';
        undecidable += s.verdict == Verdict::Undecidable ? 1 : 0;
      }
      write_text_file(dir / "scores.jsonl", lines.str());

      const std::vector<LabeledScore> labeled = labeled_scores(prepared, scores);
      const RocCurve curve = roc(labeled);
      std::ostringstream roc_csv;
      roc_csv << "fpr,tpr,threshold\n";
      for (const RocPoint& p : curve.points) {
        roc_csv << format_double(p.fpr) << ',' << format_double(p.tpr) << ',' << format_double(p.threshold) << '\n';
      }
      write_text_file(dir / "roc.csv", roc_csv.str());

      std::ostringstream hist_csv;
      hist_csv << "bin_lo,bin_hi,real_frac,gan_frac\n";
      for (const HistogramRow& r : score_histogram(labeled, eval_bins)) {
        hist_csv << format_double(r.bin_lo) << ',' << format_double(r.bin_hi) << ',' << format_double(r.real_frac)
                 << ',' << format_double(r.gan_frac) << '\n';
      }
      write_text_file(dir / "hist.csv", hist_csv.str());

      std::size_t n_real = 0, n_gan = 0;
      for (const LabeledScore& s : labeled) (s.label == Label::Real ? n_real : n_gan) += 1;
      Json metrics;
      metrics["auc"] = curve.auc;
      metrics["n_real"] = n_real;
      metrics["n_gan"] = n_gan;
      metrics["d"] = config.d;
      metrics["threshold"] = config.threshold;
      metrics["youden_threshold"] = youden_threshold(curve);
      metrics["n_faces"] = scores.size();
      metrics["n_undecidable"] = undecidable;
      metrics["config"] = config_json;
      detail::write_json(dir / "metrics.json", metrics);
      out << metrics.dump(2) << '\n';
    } else if (*sweep) {
      const PipelineConfig config = sweep_flags.resolve();
      const std::filesystem::path dir(sweep_outdir);
      detail::ensure_dir(dir);
      const Manifest manifest = read_manifest(sweep_manifest);
      const std::vector<FaceInput> faces = load_faces(manifest, config, sweep_flags.jobs);

      Json config_json = to_json(config);
      config_json["manifest"] = sweep_manifest;
      config_json["d_values"] = sweep_values;
      detail::write_json(dir / "config.json", config_json);

      const std::vector<SweepPoint> points = sweep_d(faces, sweep_values, config, sweep_flags.jobs);
      std::ostringstream csv;
      csv << "d,auc\n";
      Json result = Json::array();
      for (const SweepPoint& p : points) {
        csv << p.d << ',' << format_double(p.auc) << '\n';
        result.push_back({{"d", p.d}, {"auc", p.auc}});
      }
      write_text_file(dir / "sweep.csv", csv.str());
      Json j;
      j["sweep"] = result;
      j["config"] = config_json;
      out << j.dump(2) << '\n';
    } else if (*synth) {
      SynthSpec spec;
      if (!synth_spec_path.empty()) {
        std::ifstream in(synth_spec_path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open spec " + synth_spec_path);
        Json parsed;
        try {
          parsed = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::InvalidSpec, e.what());
        }
        spec = synth_spec_from_json(parsed);
      }
      const std::filesystem::path dir(synth_outdir);
      const std::filesystem::path manifest = write_synth_corpus(spec, dir);
      detail::write_json(dir / "synth_spec.json", to_json(spec));
      Json j;
      j["manifest"] = manifest.string();
      j["n_faces"] = 2 * spec.n_per_class;
      j["spec"] = to_json(spec);
      out << j.dump(2) << '\n';
    }
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    emit_error(err, to_string(e.code()), e.detail(), code);
    return code;
  } catch (const std::exception& e) {
    emit_error(err, "InternalError", e.what(), kData);
    return kData;
  }
  return kOk;
}

}  // namespace pupilshape::cli
