#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccc/dataset/record.hpp"

namespace ccc {

// Manifest: one JSON object per line. Paths are stored relative to the
// manifest's directory when they live below it.

nlohmann::json record_to_json(const MultiChannelRecord& r, const std::filesystem::path& root);
/// Throws MalformedLine for missing or mistyped fields.
MultiChannelRecord record_from_json(const nlohmann::json& j, const std::filesystem::path& root);

/// Polygons are loaded from each record's label file when `load_labels`.
std::vector<MultiChannelRecord> read_manifest(const std::filesystem::path& path,
                                              bool load_labels = true);
void write_manifest(const std::filesystem::path& path, std::span<const MultiChannelRecord> records);

}  // namespace ccc
