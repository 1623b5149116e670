#include "ccc/eval/report.hpp"

#include <fmt/format.h>

namespace ccc {

nlohmann::json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

nlohmann::json to_json(const ClassificationMetrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

nlohmann::json to_json(const MetricSummary& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

nlohmann::json to_json(const FoldAggregate& a) {
  return {{"accuracy", to_json(a.accuracy)},
          {"precision", to_json(a.precision)},
          {"recall", to_json(a.recall)},
          {"f1", to_json(a.f1)}};
}

nlohmann::json to_json(const SegEvalReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
    per.push_back({{"iou", r.thresholds[i]}, {"mask_ap", r.mask_ap[i]}, {"box_ap", r.box_ap[i]}});
  }
  return {{"images", r.images},
          {"predictions", r.predictions},
          {"ground_truths", r.ground_truths},
          {"mask_map50", r.mask_map50},
          {"mask_map75", r.mask_map75},
          {"mask_map50_95", r.mask_map},
          {"box_map50_95", r.box_map},
          {"per_threshold", per}};
}

std::string render_fold_table(std::span<const ClassificationMetrics> per_fold,
                              const FoldAggregate& a) {
  std::string out = fmt::format("{:<8}{:>18}{:>18}{:>18}{:>18}\n", "Fold", "Accuracy (%)",
                                "Precision (%)", "Recall (%)", "F1 (%)");
  for (std::size_t i = 0; i < per_fold.size(); ++i) {
    const auto& m = per_fold[i];
    out += fmt::format("{:<8}{:>18.2f}{:>18.2f}{:>18.2f}{:>18.2f}\n", i, 100 * m.accuracy,
                       100 * m.precision, 100 * m.recall, 100 * m.f1);
  }
  auto cell = [](const MetricSummary& s) {
    return fmt::format("{:.2f} ± {:.2f}", 100 * s.mean, 100 * s.stddev);
  };
  // fmt pads by code points, so the ± sign counts as one column.
  out += fmt::format("{:<8}{:>18}{:>18}{:>18}{:>18}\n", "Mean", cell(a.accuracy), cell(a.precision),
                     cell(a.recall), cell(a.f1));
  return out;
}

std::string render_segeval_table(const SegEvalReport& r) {
  std::string out = fmt::format("{:>16}{:>16}{:>20}{:>20}\n", "mask mAP@0.5", "mask mAP@0.75",
                                "mask mAP@0.5:0.95", "box mAP@0.5:0.95");
  out += fmt::format("{:>16.2f}{:>16.2f}{:>20.2f}{:>20.2f}\n", 100 * r.mask_map50, 100 * r.mask_map75,
                     100 * r.mask_map, 100 * r.box_map);
  return out;
}

}  // namespace ccc
