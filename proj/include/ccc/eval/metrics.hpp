#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccc/imaging/image.hpp"
#include "ccc/inference/prediction.hpp"

namespace ccc {

struct ConfusionCounts {
  std::int64_t tp{0};
  std::int64_t fp{0};
  std::int64_t tn{0};
  std::int64_t fn{0};

  std::int64_t total() const noexcept { return tp + fp + tn + fn; }
  void add(bool truth_positive, bool predicted_positive) noexcept;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ClassificationMetrics {
  double accuracy{0.0};
  double precision{0.0};
  double recall{0.0};
  double f1{0.0};
};

/// accuracy = (tp+tn)/total, precision = tp/(tp+fp), recall = tp/(tp+fn),
/// f1 = 2PR/(P+R). A zero denominator throws UndefinedMetric naming the
/// metric; an all-zero table throws EmptyEvaluation.
ClassificationMetrics classification_metrics(const ConfusionCounts& c);

/// |a∩b| / |a∪b|, defined as 1.0 when both masks are empty.
double iou(const BinaryMask& a, const BinaryMask& b);
/// Same convention on pixel boxes.
double box_iou(const Box& a, const Box& b);

enum class IouKind { Mask, Box };

/// Predictions and ground truth for one image. Matching never crosses images.
struct ImageEval {
  std::vector<InstancePrediction> preds;
  std::vector<BinaryMask> gts;
};

struct Match {
  int image{0};
  int pred{0};
  int gt{0};
  double iou{0.0};
};

struct ApResult {
  double iou_threshold{0.0};
  double ap{0.0};
  std::vector<Match> matches;
};

/// {0.50, 0.55, ..., 0.95}, each computed as (50 + 5i) / 100.
std::vector<double> coco_thresholds();

/// Predictions are ranked by descending confidence across all images (ties
/// keep image order, then insertion order). Each takes the unmatched ground
/// truth of its own image with the highest IoU (lowest index on ties) and is
/// a true positive iff that IoU >= threshold. AP is the 101-point
/// interpolated area under the precision envelope.
/// Throws EmptyEvaluation when there is no ground truth at all and
/// DimensionMismatch when masks within an image differ in shape.
ApResult average_precision(std::span<const ImageEval> images, double iou_threshold,
                           IouKind kind = IouKind::Mask);
ApResult average_precision(std::span<const InstancePrediction> preds,
                           std::span<const BinaryMask> gts, double iou_threshold);

/// Mean AP over `thresholds` (default: coco_thresholds()).
double map_range(std::span<const ImageEval> images, std::span<const double> thresholds = {},
                 IouKind kind = IouKind::Mask);

struct SegEvalReport {
  std::size_t images{0};
  std::size_t predictions{0};
  std::size_t ground_truths{0};
  std::vector<double> thresholds;
  std::vector<double> mask_ap;  ///< Per threshold.
  std::vector<double> box_ap;
  double mask_map50{0.0};
  double mask_map75{0.0};
  double mask_map{0.0};
  double box_map{0.0};
  /// Per ground truth, IoU of its best-overlapping prediction (0 when none).
  std::vector<double> best_iou_per_gt;
};

/// Computes every IoU once, then all thresholds for both kinds.
SegEvalReport evaluate_segmentation(std::span<const ImageEval> images);

struct MetricSummary {
  double mean{0.0};
  double stddev{0.0};  ///< Sample (n-1) standard deviation.
};

struct FoldAggregate {
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
};

/// Throws InsufficientFolds for fewer than two folds.
FoldAggregate aggregate_folds(std::span<const ClassificationMetrics> per_fold);

double median(std::vector<double> values);

}  // namespace ccc
