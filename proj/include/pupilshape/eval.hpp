#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pupilshape/error.hpp"

namespace pupilshape {

enum class Label { Real, Gan, Unknown };

constexpr std::string_view to_string(Label l) {
  switch (l) {
    case Label::Real: return "real";
    case Label::Gan: return "gan";
    case Label::Unknown: return "unknown";
  }
  return "unknown";
}

inline Label parse_label(std::string_view s) {
  if (s == "real") return Label::Real;
  if (s == "gan") return Label::Gan;
  if (s == "unknown" || s.empty()) return Label::Unknown;
  throw Error(ErrorCode::ManifestError, "unknown label '" + std::string(s) + "'");
}

struct LabeledScore {
  std::string face_id;
  Label label = Label::Unknown;
  double score = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  /// Faces with score >= threshold are called real; +inf for the origin.
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

namespace detail {

struct ClassCounts {
  std::size_t real = 0;
  std::size_t gan = 0;
};

inline ClassCounts count_classes(std::span<const LabeledScore> scores) {
  ClassCounts counts;
  for (const LabeledScore& s : scores) {
    if (s.label == Label::Unknown) continue;
    if (!std::isfinite(s.score)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite score for face " + s.face_id);
    }
    (s.label == Label::Real ? counts.real : counts.gan) += 1;
  }
  if (counts.real == 0 || counts.gan == 0) {
    throw Error(ErrorCode::OneClassOnly, "need at least one real and one gan score, got " +
                                             std::to_string(counts.real) + " real and " +
                                             std::to_string(counts.gan) + " gan");
  }
  return counts;
}

}  // namespace detail

/// Mann-Whitney AUC with real as the positive class and ties counted as one
/// half. Computed from doubled mid-ranks so the numerator is an exact integer.
inline double auc_rank(std::span<const LabeledScore> scores) {
  const detail::ClassCounts counts = detail::count_classes(scores);
  std::vector<const LabeledScore*> sorted;
  for (const LabeledScore& s : scores) {
    if (s.label != Label::Unknown) sorted.push_back(&s);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore* l, const LabeledScore* r) { return l->score < r->score; });

  std::uint64_t doubled_rank_sum = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j]->score == sorted[i]->score) ++j;
    // Ranks i+1..j share the mid-rank (i + 1 + j) / 2.
    const std::uint64_t doubled_mid = i + 1 + j;
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k]->label == Label::Real) doubled_rank_sum += doubled_mid;
    }
    i = j;
  }
  const std::uint64_t np = counts.real;
  const std::uint64_t nn = counts.gan;
  const std::uint64_t doubled_u = doubled_rank_sum - np * (np + 1);
  return static_cast<double>(doubled_u) / (2.0 * static_cast<double>(np) * static_cast<double>(nn));
}

inline double trapezoid_auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

/// ROC over every distinct score, from (0,0) at +inf down to (1,1) at the
/// lowest score.
inline RocCurve roc(std::span<const LabeledScore> scores) {
  const detail::ClassCounts counts = detail::count_classes(scores);
  std::vector<const LabeledScore*> sorted;
  for (const LabeledScore& s : scores) {
    if (s.label != Label::Unknown) sorted.push_back(&s);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore* l, const LabeledScore* r) { return l->score > r->score; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  const double np = static_cast<double>(counts.real);
  const double nn = counts.gan;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double threshold = sorted[i]->score;
    while (i < sorted.size() && sorted[i]->score == threshold) {
      (sorted[i]->label == Label::Real ? tp : fp) += 1;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np, threshold});
  }
  curve.auc = auc_rank(scores);
  return curve;
}

/// Threshold of the ROC point maximising tpr - fpr (Youden's J); the first
/// such point wins, i.e. the highest threshold.
inline double youden_threshold(const RocCurve& curve) {
  double best_j = -1.0;
  double best_t = 0.0;
  for (const RocPoint& p : curve.points) {
    if (!std::isfinite(p.threshold)) continue;
    const double j = p.tpr - p.fpr;
    if (j > best_j) {
      best_j = j;
      best_t = p.threshold;
    }
  }
  return best_t;
}

struct HistogramRow {
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  double real_frac = 0.0;
  double gan_frac = 0.0;
};

inline std::size_t histogram_bin(double score, std::size_t bins) {
  const double clamped = std::clamp(score, 0.0, 1.0);
  return std::min(static_cast<std::size_t>(clamped * static_cast<double>(bins)), bins - 1);
}

/// Per-class normalised counts over [0, 1]; the last bin is closed.
inline std::vector<HistogramRow> score_histogram(std::span<const LabeledScore> scores, std::size_t bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "histogram needs at least 2 bins");
  const detail::ClassCounts counts = detail::count_classes(scores);
  std::vector<std::size_t> real(bins, 0), gan(bins, 0);
  for (const LabeledScore& s : scores) {
    if (s.label == Label::Unknown) continue;
    (s.label == Label::Real ? real : gan)[histogram_bin(s.score, bins)] += 1;
  }
  std::vector<HistogramRow> rows(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    rows[b].bin_lo = static_cast<double>(b) / static_cast<double>(bins);
    rows[b].bin_hi = static_cast<double>(b + 1) / static_cast<double>(bins);
    rows[b].real_frac = static_cast<double>(real[b]) / static_cast<double>(counts.real);
    rows[b].gan_frac = static_cast<double>(gan[b]) / static_cast<double>(counts.gan);
  }
  return rows;
}

}  // namespace pupilshape
