#pragma once

#include <optional>
#include <string_view>

#include "ccc/imaging/image.hpp"

namespace ccc {

enum class ClusterLabel { Cluster, NonCluster, Unknown };

std::string_view to_string(ClusterLabel label);
/// Accepts "cluster", "non-cluster" and "unknown".
std::optional<ClusterLabel> parse_cluster_label(std::string_view text);

/// `score` is the probability of `label`; label is Cluster iff the cluster
/// probability is >= 0.5.
struct ClusterPrediction {
  ClusterLabel label{ClusterLabel::NonCluster};
  double score{0.0};
};

/// `box` is always the tight bounding box of `mask`.
struct InstancePrediction {
  BinaryMask mask;
  Box box;
  double confidence{0.0};
  int class_id{0};
};

/// Builds an instance whose box is recomputed from the mask (empty mask gives
/// an all-zero box).
InstancePrediction make_instance(BinaryMask mask, double confidence, int class_id = 0);

}  // namespace ccc
