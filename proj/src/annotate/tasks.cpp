#include "ccc/annotate/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ccc/dataset/labels.hpp"
#include "ccc/dataset/manifest.hpp"
#include "ccc/error.hpp"
#include "ccc/imaging/components.hpp"
#include "ccc/imaging/image_io.hpp"
#include "ccc/imaging/raster.hpp"

namespace ccc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Pending: return "pending";
    case TaskStatus::Proposed: return "proposed";
    case TaskStatus::Accepted: return "accepted";
  }
  return "pending";
}

json polygon_to_json(const Polygon& p) {
  json pts = json::array();
  for (const auto& v : p.vertices) pts.push_back({v.x, v.y});
  return {{"points", pts}};
}

Polygon polygon_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw Error(ErrorCode::InvalidArgument, R"(polygon must be {"points": [[x,y],...]})");
  }
  Polygon p;
  for (const auto& pt : j["points"]) {
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw Error(ErrorCode::InvalidArgument, "polygon point must be [x,y]");
    }
    p.vertices.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  return p;
}

namespace {

json box_json(const Box& b) { return json::array({b.x, b.y, b.w, b.h}); }

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::InvalidArgument, "box must be [x,y,w,h]");
  for (const auto& v : j)
    if (!v.is_number_integer()) throw Error(ErrorCode::InvalidArgument, "box values must be integers");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

void check_box(const Box& b, int width, int height) {
  if (b.w <= 0 || b.h <= 0 || b.area() < 4) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("box {}x{} is smaller than 4 px", b.w, b.h));
  }
  if (b.x < 0 || b.y < 0 || static_cast<long long>(b.x) + b.w > width || static_cast<long long>(b.y) + b.h > height) {
    throw Error(ErrorCode::BoxOutOfBounds,
                fmt::format("box ({},{},{},{}) leaves the {}x{} image", b.x, b.y, b.w, b.h, width, height));
  }
}

constexpr int kProposalMargin = 2;

}  // namespace

json to_json(const AnnotationTask& t) {
  return {{"id", t.id},
          {"width", t.width},
          {"height", t.height},
          {"status", to_string(t.status)},
          {"box", t.box ? box_json(*t.box) : json(nullptr)},
          {"proposal", t.proposal ? polygon_to_json(*t.proposal) : json(nullptr)},
          {"annotator", t.annotator ? json(*t.annotator) : json(nullptr)},
          {"reviewer", t.reviewer ? json(*t.reviewer) : json(nullptr)},
          {"rejections", t.rejections}};
}

Polygon propose_polygon(const ImageRGB& img, const Box& box, const Segmenter& seg) {
  check_box(box, img.width(), img.height());
  const int x0 = std::max(0, box.x - kProposalMargin);
  const int y0 = std::max(0, box.y - kProposalMargin);
  const int x1 = std::min(img.width(), box.x + box.w + kProposalMargin);
  const int y1 = std::min(img.height(), box.y + box.h + kProposalMargin);

  // Instance masks restricted to the region, in full-image coordinates.
  std::vector<BinaryMask> candidates;
  if (seg.fixed_input()) {
    for (auto& inst : seg.segment(img)) {
      BinaryMask m(img.width(), img.height());
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) m.set(x, y, inst.mask.at(x, y));
      candidates.push_back(std::move(m));
    }
  } else {
    ImageRGB crop(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) crop.set(x - x0, y - y0, img.at(x, y));
    for (auto& inst : seg.segment(crop)) {
      BinaryMask m(img.width(), img.height());
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) m.set(x, y, inst.mask.at(x - x0, y - y0));
      candidates.push_back(std::move(m));
    }
  }

  BinaryMask best;
  std::size_t best_area = 0;
  for (const auto& m : candidates) {
    const ComponentLabels cc = connected_components(m);
    for (const auto& c : cc.components) {
      if (c.area > best_area) {
        best_area = c.area;
        best = cc.mask_of(c.id);
      }
    }
  }
  if (best_area == 0) {
    throw Error(ErrorCode::EmptyProposal,
                fmt::format("no object found in box ({},{},{},{})", box.x, box.y, box.w, box.h));
  }
  return mask_to_polygons(best).front();
}

TaskStore::TaskStore(std::vector<MultiChannelRecord> records, fs::path work_dir,
                     std::shared_ptr<const Segmenter> segmenter)
    : work_dir_(std::move(work_dir)), journal_(work_dir_ / "journal.jsonl"), segmenter_(std::move(segmenter)) {
  if (!segmenter_) throw Error(ErrorCode::InvalidArgument, "annotation needs a segmenter");
  std::error_code ec;
  fs::create_directories(work_dir_ / "labels", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + work_dir_.string() + ": " + ec.message());
  for (auto& r : records) {
    auto s = std::make_unique<Slot>();
    const ImageRGB bf = read_image(r.brightfield);
    s->task.id = r.id;
    s->task.width = bf.width();
    s->task.height = bf.height();
    s->record = std::move(r);
    const std::string id = s->task.id;
    if (!slots_.emplace(id, std::move(s)).second) throw Error(ErrorCode::InvalidArgument, "duplicate record id " + id);
    order_.push_back(id);
  }
  std::sort(order_.begin(), order_.end());
  replay();
}

std::unique_ptr<TaskStore> TaskStore::open(const fs::path& manifest, const fs::path& work_dir,
                                           std::shared_ptr<const Segmenter> segmenter) {
  return std::make_unique<TaskStore>(read_manifest(manifest, false), work_dir, std::move(segmenter));
}

TaskStore::Slot& TaskStore::slot(const std::string& id) const {
  const auto it = slots_.find(id);
  if (it == slots_.end()) throw Error(ErrorCode::NotFound, "no task for record '" + id + "'");
  return *it->second;
}

AnnotationTask TaskStore::get(const std::string& id) const {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  return s.task;
}

const MultiChannelRecord& TaskStore::record(const std::string& id) const { return slot(id).record; }

fs::path TaskStore::label_path(const std::string& id) const { return work_dir_ / "labels" / label_file_name(id); }

void TaskStore::append(const json& event) {
  std::lock_guard lock(journal_mutex_);
  json e = event;
  e["seq"] = ++seq_;
  std::ofstream out(journal_, std::ios::binary | std::ios::app);
  out << e.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "cannot append to " + journal_.string());
}

void TaskStore::apply(Slot& s, const json& e) {
  AnnotationTask& t = s.task;
  const std::string kind = e.at("event").get<std::string>();
  if (kind == "box") {
    t.box = box_from_json(e.at("box"));
    t.just_rejected = false;
  } else if (kind == "propose") {
    t.box = box_from_json(e.at("box"));
    t.proposal = polygon_from_json(e.at("polygon"));
    if (e.contains("annotator") && e["annotator"].is_string()) t.annotator = e["annotator"].get<std::string>();
    t.status = TaskStatus::Proposed;
    t.just_rejected = false;
  } else if (kind == "accept") {
    if (e.contains("reviewer") && e["reviewer"].is_string()) t.reviewer = e["reviewer"].get<std::string>();
    t.status = TaskStatus::Accepted;
  } else if (kind == "reject") {
    t.proposal.reset();
    t.status = TaskStatus::Pending;
    ++t.rejections;
    t.just_rejected = true;
  } else {
    throw Error(ErrorCode::MalformedLine, "unknown journal event '" + kind + "'");
  }
}

void TaskStore::replay() {
  std::ifstream in(journal_, std::ios::binary);
  if (!in) return;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      // A final line without its newline is a write cut short by a crash:
      // drop it so later appends start on a fresh line.
      fs::resize_file(journal_, pos);
      break;
    }
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    try {
      const json e = json::parse(line);
      apply(slot(e.at("id").get<std::string>()), e);
      seq_ = std::max<std::uint64_t>(seq_, e.value("seq", std::uint64_t{0}));
    } catch (const std::exception& ex) {
      throw Error(ErrorCode::MalformedLine, fmt::format("{}:{}: {}", journal_.string(), line_no, ex.what()));
    }
  }
}

AnnotationTask TaskStore::set_box(const std::string& id, const Box& box) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  if (s.task.status != TaskStatus::Pending) {
    throw Error(ErrorCode::InvalidTransition, fmt::format("cannot set a box on a {} task", to_string(s.task.status)));
  }
  check_box(box, s.task.width, s.task.height);
  const json e = {{"event", "box"}, {"id", id}, {"box", box_json(box)}};
  append(e);
  apply(s, e);
  return s.task;
}

AnnotationTask TaskStore::propose(const std::string& id, const std::optional<Box>& box,
                                  const std::optional<std::string>& annotator) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  if (s.task.status != TaskStatus::Pending) {
    throw Error(ErrorCode::InvalidTransition, fmt::format("cannot propose on a {} task", to_string(s.task.status)));
  }
  if (box && box != s.task.box) {
    check_box(*box, s.task.width, s.task.height);
    const json e = {{"event", "box"}, {"id", id}, {"box", box_json(*box)}};
    append(e);
    apply(s, e);
  }
  if (!s.task.box) throw Error(ErrorCode::InvalidArgument, "task '" + id + "' has no box to prompt with");
  const Polygon poly = propose_polygon(read_image(s.record.brightfield), *s.task.box, *segmenter_);
  json e = {{"event", "propose"}, {"id", id}, {"box", box_json(*s.task.box)}, {"polygon", polygon_to_json(poly)}};
  if (annotator) e["annotator"] = *annotator;
  append(e);
  apply(s, e);
  return s.task;
}

AnnotationTask TaskStore::accept(const std::string& id, const std::optional<std::string>& reviewer) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  if (s.task.status == TaskStatus::Accepted) return s.task;
  if (s.task.status != TaskStatus::Proposed) {
    throw Error(ErrorCode::InvalidTransition, fmt::format("cannot accept a {} task", to_string(s.task.status)));
  }
  const std::vector<LabeledPolygon> labels{{0, *s.task.proposal}};
  save_seg_labels(label_path(id), labels);
  json e = {{"event", "accept"}, {"id", id}};
  if (reviewer) e["reviewer"] = *reviewer;
  append(e);
  apply(s, e);
  return s.task;
}

AnnotationTask TaskStore::reject(const std::string& id) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  if (s.task.status == TaskStatus::Pending && s.task.just_rejected) return s.task;
  if (s.task.status != TaskStatus::Proposed) {
    throw Error(ErrorCode::InvalidTransition, fmt::format("cannot reject a {} task", to_string(s.task.status)));
  }
  const json e = {{"event", "reject"}, {"id", id}};
  append(e);
  apply(s, e);
  return s.task;
}

std::vector<AnnotationTask> TaskStore::review_queue() const {
  std::vector<AnnotationTask> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(get(id));
  std::stable_partition(out.begin(), out.end(),
                        [](const AnnotationTask& t) { return t.status == TaskStatus::Pending; });
  return out;
}

}  // namespace ccc
