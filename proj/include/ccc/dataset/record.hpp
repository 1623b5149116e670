#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccc/imaging/image.hpp"
#include "ccc/inference/prediction.hpp"

namespace ccc {

/// Cluster composition. Indeterminate only ever appears as a decision, never
/// as a ground-truth label.
enum class Phenotype { RBC, PLT, WBC, WBC_PLT, Indeterminate };

inline constexpr Phenotype kStainedPhenotypes[] = {Phenotype::RBC, Phenotype::PLT, Phenotype::WBC,
                                                   Phenotype::WBC_PLT};

/// Manifest form: "RBC", "PLT", "WBC", "WBC+PLT", "Indeterminate".
std::string_view to_label_string(Phenotype p);
/// Report form: "RBC_cluster", ..., "WBC_PLT_cluster", "Indeterminate".
std::string_view to_decision_string(Phenotype p);
/// Accepts either form.
std::optional<Phenotype> parse_phenotype(std::string_view text);

struct LabeledPolygon {
  int class_id{0};
  Polygon polygon;
};

enum class Channel { Brightfield, CD61, CD45 };
std::string_view to_string(Channel c);
/// Accepts "bf"/"brightfield", "cd61", "cd45".
std::optional<Channel> parse_channel(std::string_view text);

struct MultiChannelRecord {
  std::string id;
  std::filesystem::path brightfield;
  std::optional<std::filesystem::path> cd61;
  std::optional<std::filesystem::path> cd45;
  ClusterLabel cluster_label{ClusterLabel::Unknown};
  /// Only present on cluster records.
  std::optional<Phenotype> phenotype_label;
  /// Segmentation label file; `polygons` holds its parsed content.
  std::optional<std::filesystem::path> labels;
  std::vector<LabeledPolygon> polygons;
  /// Marked for exclusion from phenotype scoring (stain outside the cluster
  /// with no valid channel).
  bool excluded{false};
  /// Free-form artifact tags, e.g. "stain_outside:cd45".
  std::vector<std::string> artifacts;

  std::optional<std::filesystem::path> channel_path(Channel c) const;
  friend bool operator==(const MultiChannelRecord&, const MultiChannelRecord&);
};

bool operator==(const LabeledPolygon& a, const LabeledPolygon& b);

/// Throws InvalidArgument when a phenotype is set on a non-cluster record or
/// the id is empty.
void validate_record(const MultiChannelRecord& r);

/// Conventional file names inside a dataset directory.
std::string channel_file_name(const std::string& id, Channel c);
std::string label_file_name(const std::string& id);

}  // namespace ccc
