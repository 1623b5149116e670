#include "ccc/dataset/labels.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ccc/error.hpp"
#include "ccc/imaging/mask_ops.hpp"
#include "ccc/imaging/raster.hpp"

namespace ccc {

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::MalformedLine, fmt::format("label line {}: {}", line, why));
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string format_seg_line(const LabeledPolygon& p) {
  if (p.class_id < 0) throw Error(ErrorCode::InvalidArgument, "class id must be non-negative");
  if (p.polygon.vertices.size() < 3) {
    throw Error(ErrorCode::DegeneratePolygon, "a label polygon needs at least 3 vertices");
  }
  std::string out = std::to_string(p.class_id);
  for (const auto& v : p.polygon.vertices) {
    if (!(v.x >= 0.0 && v.x <= 1.0 && v.y >= 0.0 && v.y <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("vertex ({}, {}) is outside [0,1]", v.x, v.y));
    }
    // +0.0 turns a -0.0 into 0 so it never prints as "-0.000000".
    fmt::format_to(std::back_inserter(out), " {:.6f} {:.6f}", v.x + 0.0, v.y + 0.0);
  }
  return out;
}

std::string write_seg_labels(std::span<const LabeledPolygon> polys) {
  std::string out;
  for (const auto& p : polys) {
    out += format_seg_line(p);
    out += '\n';
  }
  return out;
}

std::vector<LabeledPolygon> read_seg_labels(std::string_view text) {
  std::vector<LabeledPolygon> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;

    LabeledPolygon lp;
    {
      const auto* b = tok[0].data();
      const auto* e = b + tok[0].size();
      const auto [ptr, ec] = std::from_chars(b, e, lp.class_id);
      if (ec != std::errc() || ptr != e || lp.class_id < 0) {
        malformed(line_no, fmt::format("bad class id '{}'", tok[0]));
      }
    }
    const std::size_t ncoord = tok.size() - 1;
    if (ncoord % 2 != 0) malformed(line_no, fmt::format("odd coordinate count {}", ncoord));
    if (ncoord < 6) malformed(line_no, fmt::format("{} points, need at least 3", ncoord / 2));
    std::vector<double> coords(ncoord);
    for (std::size_t i = 0; i < ncoord; ++i) {
      const auto& t = tok[i + 1];
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), coords[i]);
      if (ec != std::errc() || ptr != t.data() + t.size()) {
        malformed(line_no, fmt::format("non-numeric coordinate '{}'", t));
      }
      if (!(coords[i] >= 0.0 && coords[i] <= 1.0)) {
        malformed(line_no, fmt::format("coordinate {} outside [0,1]", t));
      }
    }
    for (std::size_t i = 0; i < ncoord; i += 2) lp.polygon.vertices.push_back({coords[i], coords[i + 1]});
    out.push_back(std::move(lp));
  }
  return out;
}

std::vector<LabeledMask> read_seg_masks(std::string_view text, int width, int height) {
  std::vector<LabeledMask> out;
  for (auto& lp : read_seg_labels(text)) {
    out.push_back({lp.class_id, rasterize_polygon(lp.polygon, width, height)});
  }
  return out;
}

std::vector<LabeledPolygon> load_seg_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open label file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return read_seg_labels(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_seg_labels(const std::filesystem::path& path, std::span<const LabeledPolygon> polys) {
  const std::string text = write_seg_labels(polys);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write label file " + path.string());
    out << text;
    if (!out.flush()) throw Error(ErrorCode::Io, "short write to " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

BinaryMask union_mask(std::span<const LabeledPolygon> polys, int width, int height) {
  std::vector<Polygon> shapes;
  for (const auto& p : polys) shapes.push_back(p.polygon);
  if (shapes.empty()) return BinaryMask(width, height);
  return rasterize_polygons(shapes, width, height);
}

}  // namespace ccc
