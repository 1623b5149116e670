#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "ccc/dataset/record.hpp"
#include "ccc/imaging/image.hpp"
#include "ccc/inference/backends.hpp"

namespace ccc {

/// pending -> proposed -> accepted, or proposed -> pending via reject.
/// A rejected proposal is cleared and the task is pending again with its box
/// kept; `rejections` counts how often that happened.
enum class TaskStatus { Pending, Proposed, Accepted };
std::string_view to_string(TaskStatus s);

struct AnnotationTask {
  std::string id;
  int width{0};
  int height{0};
  TaskStatus status{TaskStatus::Pending};
  std::optional<Box> box;
  /// Normalized; present iff status is Proposed or Accepted.
  std::optional<Polygon> proposal;
  std::optional<std::string> annotator;
  std::optional<std::string> reviewer;
  int rejections{0};
  /// Last applied event was a reject; a repeated reject is then a no-op.
  bool just_rejected{false};
};

/// {"points": [[x,y],...]}, coordinates normalized to [0,1].
nlohmann::json polygon_to_json(const Polygon& p);
/// Inverse of polygon_to_json. Throws InvalidArgument on malformed input.
Polygon polygon_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AnnotationTask& t);

/// Largest segmented component inside the box dilated by 2 px, traced as a
/// pixel-corner polygon (normalized coordinates). Throws BoxOutOfBounds when the
/// box leaves the image, InvalidArgument below 4 px of area, EmptyProposal
/// when nothing is found.
Polygon propose_polygon(const ImageRGB& img, const Box& box, const Segmenter& seg);

/// Annotation tasks of one dataset, persisted as label files plus an
/// append-only JSON-lines journal replayed on open. Mutations of one task
/// are serialized; different tasks proceed concurrently.
class TaskStore {
 public:
  /// Reads image sizes for every record and replays
  /// `work_dir`/journal.jsonl when present. Accepted labels go to
  /// `work_dir`/labels/<id>.txt.
  TaskStore(std::vector<MultiChannelRecord> records, std::filesystem::path work_dir,
            std::shared_ptr<const Segmenter> segmenter);
  static std::unique_ptr<TaskStore> open(const std::filesystem::path& manifest, const std::filesystem::path& work_dir,
                                         std::shared_ptr<const Segmenter> segmenter);

  std::size_t size() const noexcept { return order_.size(); }
  /// Throws NotFound.
  AnnotationTask get(const std::string& id) const;
  const MultiChannelRecord& record(const std::string& id) const;

  /// Allowed while pending. Throws BoxOutOfBounds, InvalidArgument.
  AnnotationTask set_box(const std::string& id, const Box& box);
  /// pending -> proposed, using `box` or the stored one.
  AnnotationTask propose(const std::string& id, const std::optional<Box>& box,
                         const std::optional<std::string>& annotator = std::nullopt);
  /// proposed -> accepted, writing the label file. Repeating it is a no-op.
  AnnotationTask accept(const std::string& id, const std::optional<std::string>& reviewer = std::nullopt);
  /// proposed -> pending, clearing the proposal. Repeating it is a no-op.
  AnnotationTask reject(const std::string& id);

  /// Pending tasks first, then the rest; each group ordered by id.
  std::vector<AnnotationTask> review_queue() const;
  std::filesystem::path label_path(const std::string& id) const;
  const std::filesystem::path& journal_path() const noexcept { return journal_; }

 private:
  struct Slot {
    AnnotationTask task;
    MultiChannelRecord record;
    mutable std::mutex mutex;
  };

  Slot& slot(const std::string& id) const;
  void append(const nlohmann::json& event);
  void apply(Slot& s, const nlohmann::json& event);
  void replay();

  std::filesystem::path work_dir_;
  std::filesystem::path journal_;
  std::shared_ptr<const Segmenter> segmenter_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::unique_ptr<Slot>> slots_;
  std::mutex journal_mutex_;
  std::uint64_t seq_{0};
};

}  // namespace ccc
