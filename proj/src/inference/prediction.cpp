#include "ccc/inference/prediction.hpp"

#include "ccc/imaging/mask_ops.hpp"

namespace ccc {

std::string_view to_string(ClusterLabel label) {
  switch (label) {
    case ClusterLabel::Cluster: return "cluster";
    case ClusterLabel::NonCluster: return "non-cluster";
    case ClusterLabel::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<ClusterLabel> parse_cluster_label(std::string_view text) {
  if (text == "cluster") return ClusterLabel::Cluster;
  if (text == "non-cluster") return ClusterLabel::NonCluster;
  if (text == "unknown") return ClusterLabel::Unknown;
  return std::nullopt;
}

InstancePrediction make_instance(BinaryMask mask, double confidence, int class_id) {
  InstancePrediction p;
  p.box = mask_bbox(mask).value_or(Box{});
  p.mask = std::move(mask);
  p.confidence = confidence;
  p.class_id = class_id;
  return p;
}

}  // namespace ccc
