#include "ccc/dataset/record.hpp"

#include "ccc/error.hpp"

namespace ccc {

std::string_view to_label_string(Phenotype p) {
  switch (p) {
    case Phenotype::RBC: return "RBC";
    case Phenotype::PLT: return "PLT";
    case Phenotype::WBC: return "WBC";
    case Phenotype::WBC_PLT: return "WBC+PLT";
    case Phenotype::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

std::string_view to_decision_string(Phenotype p) {
  switch (p) {
    case Phenotype::RBC: return "RBC_cluster";
    case Phenotype::PLT: return "PLT_cluster";
    case Phenotype::WBC: return "WBC_cluster";
    case Phenotype::WBC_PLT: return "WBC_PLT_cluster";
    case Phenotype::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

std::optional<Phenotype> parse_phenotype(std::string_view text) {
  for (Phenotype p : {Phenotype::RBC, Phenotype::PLT, Phenotype::WBC, Phenotype::WBC_PLT,
                      Phenotype::Indeterminate}) {
    if (text == to_label_string(p) || text == to_decision_string(p)) return p;
  }
  return std::nullopt;
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::Brightfield: return "bf";
    case Channel::CD61: return "cd61";
    case Channel::CD45: return "cd45";
  }
  return "bf";
}

std::optional<Channel> parse_channel(std::string_view text) {
  if (text == "bf" || text == "brightfield") return Channel::Brightfield;
  if (text == "cd61") return Channel::CD61;
  if (text == "cd45") return Channel::CD45;
  return std::nullopt;
}

std::optional<std::filesystem::path> MultiChannelRecord::channel_path(Channel c) const {
  switch (c) {
    case Channel::Brightfield: return brightfield;
    case Channel::CD61: return cd61;
    case Channel::CD45: return cd45;
  }
  return std::nullopt;
}

bool operator==(const LabeledPolygon& a, const LabeledPolygon& b) {
  if (a.class_id != b.class_id || a.polygon.vertices.size() != b.polygon.vertices.size()) return false;
  for (std::size_t i = 0; i < a.polygon.vertices.size(); ++i) {
    if (!(a.polygon.vertices[i] == b.polygon.vertices[i])) return false;
  }
  return true;
}

bool operator==(const MultiChannelRecord& a, const MultiChannelRecord& b) {
  return a.id == b.id && a.brightfield == b.brightfield && a.cd61 == b.cd61 && a.cd45 == b.cd45 &&
         a.cluster_label == b.cluster_label && a.phenotype_label == b.phenotype_label &&
         a.labels == b.labels && a.polygons == b.polygons && a.excluded == b.excluded &&
         a.artifacts == b.artifacts;
}

void validate_record(const MultiChannelRecord& r) {
  if (r.id.empty()) throw Error(ErrorCode::InvalidArgument, "record id must not be empty");
  if (r.phenotype_label && r.cluster_label != ClusterLabel::Cluster) {
    throw Error(ErrorCode::InvalidArgument,
                "record '" + r.id + "' has a phenotype label but is not labelled cluster");
  }
  if (r.phenotype_label == Phenotype::Indeterminate) {
    throw Error(ErrorCode::InvalidArgument, "record '" + r.id + "': Indeterminate is not a ground-truth label");
  }
}

std::string channel_file_name(const std::string& id, Channel c) {
  return id + "_" + std::string(to_string(c)) + ".png";
}

std::string label_file_name(const std::string& id) { return id + ".txt"; }

}  // namespace ccc
