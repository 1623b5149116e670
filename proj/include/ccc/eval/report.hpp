#pragma once

#include <span>
#include <string>

#include "json.hpp"

#include "ccc/eval/metrics.hpp"

namespace ccc {

nlohmann::json to_json(const ConfusionCounts& c);
nlohmann::json to_json(const ClassificationMetrics& m);
nlohmann::json to_json(const MetricSummary& s);
nlohmann::json to_json(const FoldAggregate& a);
nlohmann::json to_json(const SegEvalReport& r);

/// One row per fold plus a mean ± std row, values in percent.
std::string render_fold_table(std::span<const ClassificationMetrics> per_fold,
                              const FoldAggregate& aggregate);
std::string render_segeval_table(const SegEvalReport& r);

}  // namespace ccc
