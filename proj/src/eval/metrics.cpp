#include "ccc/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ccc/error.hpp"
#include "ccc/imaging/mask_ops.hpp"

namespace ccc {

void ConfusionCounts::add(bool truth_positive, bool predicted_positive) noexcept {
  if (truth_positive) {
    (predicted_positive ? tp : fn) += 1;
  } else {
    (predicted_positive ? fp : tn) += 1;
  }
}

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) {
    throw Error(ErrorCode::InvalidArgument, "confusion counts must be non-negative");
  }
  if (c.total() == 0) throw Error(ErrorCode::EmptyEvaluation, "confusion table is empty");
  if (c.tp + c.fp == 0) throw Error(ErrorCode::UndefinedMetric, "precision is undefined: tp+fp == 0");
  if (c.tp + c.fn == 0) throw Error(ErrorCode::UndefinedMetric, "recall is undefined: tp+fn == 0");
  ClassificationMetrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.precision + m.recall == 0.0) {
    throw Error(ErrorCode::UndefinedMetric, "f1 is undefined: precision + recall == 0");
  }
  m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

namespace {

Box box_overlap(const Box& a, const Box& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w);
  const int y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return {};
  return {x0, y0, x1 - x0, y1 - y0};
}

// IoU from precomputed areas and boxes; the intersection is only counted
// inside the overlap of the two bounding boxes.
double mask_iou_fast(const BinaryMask& a, std::size_t area_a, const Box& box_a,
                     const BinaryMask& b, std::size_t area_b, const Box& box_b) {
  if (area_a == 0 && area_b == 0) return 1.0;
  const Box o = box_overlap(box_a, box_b);
  std::size_t inter = 0;
  for (int y = o.y; y < o.y + o.h; ++y)
    for (int x = o.x; x < o.x + o.w; ++x) inter += (a.at(x, y) && b.at(x, y)) ? 1 : 0;
  return static_cast<double>(inter) / static_cast<double>(area_a + area_b - inter);
}

struct IouTables {
  // [pred][gt], row-major per image.
  std::vector<std::vector<double>> mask;
  std::vector<std::vector<double>> box;
};

void check_image_shapes(const ImageEval& img, int index) {
  const BinaryMask* ref = nullptr;
  for (const auto& p : img.preds) {
    if (ref && !p.mask.same_shape(*ref)) {
      throw Error(ErrorCode::DimensionMismatch, fmt::format("image {}: prediction masks differ in shape", index));
    }
    ref = &p.mask;
  }
  for (const auto& g : img.gts) {
    if (ref && !g.same_shape(*ref)) {
      throw Error(ErrorCode::DimensionMismatch, fmt::format("image {}: ground-truth mask shape differs", index));
    }
    ref = &g;
  }
}

IouTables compute_ious(std::span<const ImageEval> images, bool want_mask, bool want_box) {
  const int n = static_cast<int>(images.size());
  for (int i = 0; i < n; ++i) check_image_shapes(images[static_cast<std::size_t>(i)], i);
  IouTables t;
  t.mask.resize(images.size());
  t.box.resize(images.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const ImageEval& img = images[static_cast<std::size_t>(i)];
    const std::size_t np = img.preds.size();
    const std::size_t ng = img.gts.size();
    std::vector<std::size_t> gt_area(ng);
    std::vector<Box> gt_box(ng);
    for (std::size_t j = 0; j < ng; ++j) {
      gt_area[j] = mask_area(img.gts[j]);
      gt_box[j] = mask_bbox(img.gts[j]).value_or(Box{});
    }
    auto& mt = t.mask[static_cast<std::size_t>(i)];
    auto& bt = t.box[static_cast<std::size_t>(i)];
    if (want_mask) mt.assign(np * ng, 0.0);
    if (want_box) bt.assign(np * ng, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
      const auto& pred = img.preds[p];
      const std::size_t pa = want_mask ? mask_area(pred.mask) : 0;
      for (std::size_t j = 0; j < ng; ++j) {
        if (want_mask) mt[p * ng + j] = mask_iou_fast(pred.mask, pa, pred.box, img.gts[j], gt_area[j], gt_box[j]);
        if (want_box) bt[p * ng + j] = box_iou(pred.box, gt_box[j]);
      }
    }
  }
  return t;
}

ApResult ap_from_tables(std::span<const ImageEval> images,
                        const std::vector<std::vector<double>>& table, double threshold) {
  std::size_t npos = 0;
  struct Ranked {
    int image;
    int pred;
    double conf;
  };
  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < images.size(); ++i) {
    npos += images[i].gts.size();
    for (std::size_t p = 0; p < images[i].preds.size(); ++p) {
      ranked.push_back({static_cast<int>(i), static_cast<int>(p), images[i].preds[p].confidence});
    }
  }
  if (npos == 0) throw Error(ErrorCode::EmptyEvaluation, "no ground-truth instances to evaluate against");
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.conf > b.conf; });

  std::vector<std::vector<char>> taken(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) taken[i].assign(images[i].gts.size(), 0);

  ApResult result;
  result.iou_threshold = threshold;
  std::vector<double> precision(ranked.size());
  std::vector<double> recall(ranked.size());
  std::size_t tp = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& cand = ranked[r];
    const auto img = static_cast<std::size_t>(cand.image);
    const std::size_t ng = images[img].gts.size();
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t j = 0; j < ng; ++j) {
      if (taken[img][j]) continue;
      const double v = table[img][static_cast<std::size_t>(cand.pred) * ng + j];
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0 && best_iou >= threshold) {
      taken[img][static_cast<std::size_t>(best)] = 1;
      result.matches.push_back({cand.image, cand.pred, best, best_iou});
      ++tp;
    }
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    recall[r] = static_cast<double>(tp) / static_cast<double>(npos);
  }
  for (std::size_t r = ranked.size(); r-- > 1;) precision[r - 1] = std::max(precision[r - 1], precision[r]);

  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double level = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  result.ap = sum / 101.0;
  return result;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  const std::size_t aa = mask_area(a);
  const std::size_t ab = mask_area(b);
  return mask_iou_fast(a, aa, mask_bbox(a).value_or(Box{}), b, ab, mask_bbox(b).value_or(Box{}));
}

double box_iou(const Box& a, const Box& b) {
  const long long inter = box_overlap(a, b).area();
  const long long uni = a.area() + b.area() - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> coco_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

ApResult average_precision(std::span<const ImageEval> images, double iou_threshold, IouKind kind) {
  const IouTables t = compute_ious(images, kind == IouKind::Mask, kind == IouKind::Box);
  return ap_from_tables(images, kind == IouKind::Mask ? t.mask : t.box, iou_threshold);
}

ApResult average_precision(std::span<const InstancePrediction> preds,
                           std::span<const BinaryMask> gts, double iou_threshold) {
  const ImageEval one{{preds.begin(), preds.end()}, {gts.begin(), gts.end()}};
  return average_precision(std::span<const ImageEval>(&one, 1), iou_threshold, IouKind::Mask);
}

double map_range(std::span<const ImageEval> images, std::span<const double> thresholds, IouKind kind) {
  const std::vector<double> defaults = coco_thresholds();
  if (thresholds.empty()) thresholds = defaults;
  const IouTables t = compute_ious(images, kind == IouKind::Mask, kind == IouKind::Box);
  const auto& table = kind == IouKind::Mask ? t.mask : t.box;
  std::vector<double> aps;
  for (double th : thresholds) aps.push_back(ap_from_tables(images, table, th).ap);
  return mean(aps);
}

SegEvalReport evaluate_segmentation(std::span<const ImageEval> images) {
  SegEvalReport r;
  r.images = images.size();
  for (const auto& img : images) {
    r.predictions += img.preds.size();
    r.ground_truths += img.gts.size();
  }
  if (r.ground_truths == 0) throw Error(ErrorCode::EmptyEvaluation, "no ground-truth instances to evaluate against");
  const IouTables t = compute_ious(images, true, true);
  r.thresholds = coco_thresholds();
  for (double th : r.thresholds) {
    r.mask_ap.push_back(ap_from_tables(images, t.mask, th).ap);
    r.box_ap.push_back(ap_from_tables(images, t.box, th).ap);
  }
  r.mask_map50 = r.mask_ap.front();
  r.mask_map75 = r.mask_ap[5];
  r.mask_map = mean(r.mask_ap);
  r.box_map = mean(r.box_ap);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::size_t ng = images[i].gts.size();
    for (std::size_t j = 0; j < ng; ++j) {
      double best = 0.0;
      for (std::size_t p = 0; p < images[i].preds.size(); ++p) best = std::max(best, t.mask[i][p * ng + j]);
      r.best_iou_per_gt.push_back(best);
    }
  }
  return r;
}

FoldAggregate aggregate_folds(std::span<const ClassificationMetrics> per_fold) {
  if (per_fold.size() < 2) {
    throw Error(ErrorCode::InsufficientFolds,
                fmt::format("need at least 2 folds to aggregate, got {}", per_fold.size()));
  }
  auto summarize = [&](double ClassificationMetrics::*field) {
    const double n = static_cast<double>(per_fold.size());
    double m = 0.0;
    for (const auto& f : per_fold) m += f.*field;
    m /= n;
    double ss = 0.0;
    for (const auto& f : per_fold) ss += (f.*field - m) * (f.*field - m);
    return MetricSummary{m, std::sqrt(ss / (n - 1.0))};
  };
  return {summarize(&ClassificationMetrics::accuracy), summarize(&ClassificationMetrics::precision),
          summarize(&ClassificationMetrics::recall), summarize(&ClassificationMetrics::f1)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyEvaluation, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace ccc
