#include "ccc/dataset/manifest.hpp"

#include <fstream>

#include <fmt/format.h>

#include "ccc/dataset/labels.hpp"
#include "ccc/error.hpp"

namespace ccc {

namespace fs = std::filesystem;

namespace {

std::string store_path(const fs::path& p, const fs::path& root) {
  const fs::path norm = p.lexically_normal();
  if (!root.empty()) {
    const fs::path rel = norm.lexically_relative(root.lexically_normal());
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  }
  return norm.generic_string();
}

fs::path load_path(const std::string& s, const fs::path& root) {
  const fs::path p(s);
  return (p.is_absolute() ? p : root / p).lexically_normal();
}

std::optional<fs::path> optional_path(const nlohmann::json& j, const char* key, const fs::path& root) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return load_path(j[key].get<std::string>(), root);
}

}  // namespace

nlohmann::json record_to_json(const MultiChannelRecord& r, const fs::path& root) {
  validate_record(r);
  nlohmann::json j;
  j["id"] = r.id;
  j["brightfield"] = store_path(r.brightfield, root);
  j["cd61"] = r.cd61 ? nlohmann::json(store_path(*r.cd61, root)) : nlohmann::json();
  j["cd45"] = r.cd45 ? nlohmann::json(store_path(*r.cd45, root)) : nlohmann::json();
  j["cluster_label"] = std::string(to_string(r.cluster_label));
  j["phenotype_label"] =
      r.phenotype_label ? nlohmann::json(std::string(to_label_string(*r.phenotype_label))) : nlohmann::json();
  j["labels"] = r.labels ? nlohmann::json(store_path(*r.labels, root)) : nlohmann::json();
  j["excluded"] = r.excluded;
  j["artifacts"] = r.artifacts;
  return j;
}

MultiChannelRecord record_from_json(const nlohmann::json& j, const fs::path& root) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedLine, "manifest entry is not an object");
  MultiChannelRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.brightfield = load_path(j.at("brightfield").get<std::string>(), root);
    r.cd61 = optional_path(j, "cd61", root);
    r.cd45 = optional_path(j, "cd45", root);
    const auto cl = j.value("cluster_label", std::string("unknown"));
    const auto parsed = parse_cluster_label(cl);
    if (!parsed) throw Error(ErrorCode::MalformedLine, "unknown cluster_label '" + cl + "'");
    r.cluster_label = *parsed;
    if (j.contains("phenotype_label") && !j["phenotype_label"].is_null()) {
      const auto text = j["phenotype_label"].get<std::string>();
      r.phenotype_label = parse_phenotype(text);
      if (!r.phenotype_label) throw Error(ErrorCode::MalformedLine, "unknown phenotype_label '" + text + "'");
    }
    r.labels = optional_path(j, "labels", root);
    r.excluded = j.value("excluded", false);
    if (j.contains("artifacts")) r.artifacts = j["artifacts"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, std::string("manifest entry: ") + e.what());
  }
  try {
    validate_record(r);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedLine, e.what());
  }
  return r;
}

std::vector<MultiChannelRecord> read_manifest(const fs::path& path, bool load_labels) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open manifest " + path.string());
  const fs::path root = path.parent_path();
  std::vector<MultiChannelRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      MultiChannelRecord r = record_from_json(nlohmann::json::parse(line), root);
      if (load_labels && r.labels && fs::exists(*r.labels)) r.polygons = load_seg_labels(*r.labels);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedLine, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MalformedLine) throw;
      throw Error(ErrorCode::MalformedLine, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

void write_manifest(const fs::path& path, std::span<const MultiChannelRecord> records) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path root = path.parent_path();
  std::string text;
  for (const auto& r : records) {
    text += record_to_json(r, root).dump();
    text += '\n';
  }
  const fs::path tmp(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write manifest " + path.string());
    out << text;
    if (!out.flush()) throw Error(ErrorCode::Io, "short write to " + path.string());
  }
  fs::rename(tmp, path);
}

}  // namespace ccc
