#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccc/dataset/record.hpp"

namespace ccc {

// Segmentation label text: one instance per line,
//   <class_id> <x1> <y1> ... <xn> <yn>
// with normalized coordinates printed as 6-decimal fixed point.

std::string format_seg_line(const LabeledPolygon& p);
std::string write_seg_labels(std::span<const LabeledPolygon> polys);

/// Blank lines are skipped. Throws MalformedLine (with the 1-based line
/// number) for a bad class id, a non-numeric token, an odd coordinate count,
/// fewer than 3 points or a coordinate outside [0,1].
std::vector<LabeledPolygon> read_seg_labels(std::string_view text);

struct LabeledMask {
  int class_id{0};
  BinaryMask mask;
};

/// Parsed and rasterized at the given image size.
std::vector<LabeledMask> read_seg_masks(std::string_view text, int width, int height);

std::vector<LabeledPolygon> load_seg_labels(const std::filesystem::path& path);
void save_seg_labels(const std::filesystem::path& path, std::span<const LabeledPolygon> polys);

/// Union of all instance masks; an empty list yields an empty mask.
BinaryMask union_mask(std::span<const LabeledPolygon> polys, int width, int height);

}  // namespace ccc
