#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "ccc/annotate/server.hpp"
#include "ccc/annotate/tasks.hpp"
#include "ccc/dataset/labels.hpp"
#include "ccc/dataset/manifest.hpp"
#include "ccc/error.hpp"
#include "ccc/eval/metrics.hpp"
#include "ccc/imaging/image_io.hpp"
#include "ccc/imaging/mask_ops.hpp"
#include "ccc/imaging/raster.hpp"
#include "ccc/synth/synth.hpp"
#include "test_support.hpp"

namespace ccc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

/// Small synthetic dataset shared by the tests of this file.
class AnnotateTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new testing::TempDir("annot_data");
    DatasetOptions o;
    o.n_per_category = 3;
    o.seed = 11;
    manifest_ = generate_dataset(data_->path(), o).manifest;
    records_ = new std::vector<MultiChannelRecord>(read_manifest(manifest_));
  }
  static void TearDownTestSuite() {
    delete records_;
    delete data_;
  }

  std::unique_ptr<TaskStore> open_store(const fs::path& work) const {
    return TaskStore::open(manifest_, work, std::make_shared<ClassicalSegmenter>());
  }

  static const MultiChannelRecord& first_of(ClusterLabel label, int skip = 0) {
    for (const auto& r : *records_) {
      if (r.cluster_label == label && skip-- == 0) return r;
    }
    throw std::logic_error("no such record");
  }

  static BinaryMask gt_mask(const MultiChannelRecord& r) { return union_mask(r.polygons, 224, 224); }
  static Box gt_box(const MultiChannelRecord& r) { return *mask_bbox(gt_mask(r)); }

  static testing::TempDir* data_;
  static fs::path manifest_;
  static std::vector<MultiChannelRecord>* records_;
};

testing::TempDir* AnnotateTest::data_ = nullptr;
fs::path AnnotateTest::manifest_;
std::vector<MultiChannelRecord>* AnnotateTest::records_ = nullptr;

TEST_F(AnnotateTest, FreshStoreHasAllTasksPending) {
  testing::TempDir work("annot_work");
  const auto store = open_store(work.path());
  const auto q = store->review_queue();
  ASSERT_EQ(q.size(), 21u);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_EQ(q[i].status, TaskStatus::Pending);
    if (i) EXPECT_LT(q[i - 1].id, q[i].id);
  }
  EXPECT_EQ(q[0].width, 224);
}

TEST_F(AnnotateTest, ProposalMatchesSyntheticCluster) {
  testing::TempDir work("annot_prop");
  const auto store = open_store(work.path());
  for (int k = 0; k < 8; ++k) {
    const MultiChannelRecord& r = first_of(ClusterLabel::Cluster, k);
    const Box gb = gt_box(r);
    // A box a few pixels looser than the cluster, as a human would draw it.
    const Box box{std::max(0, gb.x - 4), std::max(0, gb.y - 4), std::min(224 - std::max(0, gb.x - 4), gb.w + 8),
                  std::min(224 - std::max(0, gb.y - 4), gb.h + 8)};
    const AnnotationTask t = store->propose(r.id, box, "ann1");
    ASSERT_EQ(t.status, TaskStatus::Proposed);
    ASSERT_TRUE(t.proposal.has_value());
    const BinaryMask m = rasterize_polygon(*t.proposal, 224, 224);
    EXPECT_GE(iou(m, gt_mask(r)), 0.9) << r.id;
    // The polygon stays inside the box widened by 2 px.
    for (const auto& v : t.proposal->vertices) {
      EXPECT_GE(v.x * 224, box.x - 2 - 1e-9);
      EXPECT_LE(v.x * 224, box.x + box.w + 2 + 1e-9);
      EXPECT_GE(v.y * 224, box.y - 2 - 1e-9);
      EXPECT_LE(v.y * 224, box.y + box.h + 2 + 1e-9);
    }
    EXPECT_EQ(t.annotator, std::optional<std::string>("ann1"));
  }
}

TEST_F(AnnotateTest, ProposalErrors) {
  testing::TempDir work("annot_err");
  const auto store = open_store(work.path());
  const MultiChannelRecord& blank = first_of(ClusterLabel::NonCluster, 6);
  ASSERT_NE(blank.id.find("blank"), std::string::npos);
  EXPECT_EQ(code_of([&] { store->propose(blank.id, Box{50, 50, 100, 100}); }), ErrorCode::EmptyProposal);
  // The box survives a failed proposal so it can be redrawn.
  EXPECT_EQ(store->get(blank.id).box, (Box{50, 50, 100, 100}));
  EXPECT_EQ(store->get(blank.id).status, TaskStatus::Pending);
  const MultiChannelRecord& c = first_of(ClusterLabel::Cluster);
  EXPECT_EQ(code_of([&] { store->propose(c.id, Box{200, 200, 40, 40}); }), ErrorCode::BoxOutOfBounds);
  EXPECT_EQ(code_of([&] { store->propose(c.id, Box{-1, 0, 40, 40}); }), ErrorCode::BoxOutOfBounds);
  EXPECT_EQ(code_of([&] { store->propose(c.id, Box{10, 10, 1, 3}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { store->propose(c.id, std::nullopt); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { store->get("nope"); }), ErrorCode::NotFound);
}

TEST_F(AnnotateTest, AcceptWritesLabelThatRoundTrips) {
  testing::TempDir work("annot_acc");
  const auto store = open_store(work.path());
  const MultiChannelRecord& r = first_of(ClusterLabel::Cluster, 1);
  const AnnotationTask p = store->propose(r.id, gt_box(r));
  const AnnotationTask a = store->accept(r.id, "rev2");
  EXPECT_EQ(a.status, TaskStatus::Accepted);
  EXPECT_EQ(a.reviewer, std::optional<std::string>("rev2"));
  const auto labels = load_seg_labels(store->label_path(r.id));
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0].class_id, 0);
  ASSERT_EQ(labels[0].polygon.vertices.size(), p.proposal->vertices.size());
  for (std::size_t i = 0; i < labels[0].polygon.vertices.size(); ++i) {
    EXPECT_NEAR(labels[0].polygon.vertices[i].x, p.proposal->vertices[i].x, 1e-6);
    EXPECT_NEAR(labels[0].polygon.vertices[i].y, p.proposal->vertices[i].y, 1e-6);
  }
  EXPECT_NO_THROW(rasterize_polygon(labels[0].polygon, 224, 224));
  // Repeating accept is a no-op.
  EXPECT_EQ(to_json(store->accept(r.id, "someone-else")), to_json(a));
  const auto q = store->review_queue();
  EXPECT_EQ(std::count_if(q.begin(), q.end(), [](const auto& t) { return t.status == TaskStatus::Pending; }), 20);
  EXPECT_EQ(q.back().id, r.id);
}

TEST_F(AnnotateTest, RejectClearsProposalAndKeepsBox) {
  testing::TempDir work("annot_rej");
  const auto store = open_store(work.path());
  const MultiChannelRecord& r = first_of(ClusterLabel::Cluster, 2);
  const Box box = gt_box(r);
  store->propose(r.id, box);
  const AnnotationTask t = store->reject(r.id);
  EXPECT_EQ(t.status, TaskStatus::Pending);
  EXPECT_FALSE(t.proposal.has_value());
  EXPECT_EQ(t.box, box);
  EXPECT_EQ(t.rejections, 1);
  EXPECT_EQ(to_json(store->reject(r.id)), to_json(t));
  EXPECT_EQ(code_of([&] { store->accept(r.id); }), ErrorCode::InvalidTransition);
  // Propose again with the stored box.
  EXPECT_EQ(store->propose(r.id, std::nullopt).status, TaskStatus::Proposed);
}

enum class StartState { Fresh, Boxed, Proposed, Rejected, Accepted };
enum class Op { SetBox, Propose, Accept, Reject };

// Expected outcome of every (state, op) pair: the new status, or the error.
struct Expectation {
  std::optional<TaskStatus> status;
  std::optional<ErrorCode> error;
};

Expectation expected(StartState s, Op op) {
  using TS = TaskStatus;
  const auto ok = [](TS t) { return Expectation{t, std::nullopt}; };
  const auto bad = Expectation{std::nullopt, ErrorCode::InvalidTransition};
  switch (s) {
    case StartState::Fresh:
    case StartState::Boxed:
      if (op == Op::SetBox) return ok(TS::Pending);
      if (op == Op::Propose) return ok(TS::Proposed);
      return bad;
    case StartState::Rejected:
      if (op == Op::SetBox) return ok(TS::Pending);
      if (op == Op::Propose) return ok(TS::Proposed);
      if (op == Op::Reject) return ok(TS::Pending);  // repeat is a no-op
      return bad;
    case StartState::Proposed:
      if (op == Op::Accept) return ok(TS::Accepted);
      if (op == Op::Reject) return ok(TS::Pending);
      return bad;
    case StartState::Accepted:
      if (op == Op::Accept) return ok(TS::Accepted);  // repeat is a no-op
      return bad;
  }
  return bad;
}

TEST_F(AnnotateTest, StateMachineIsExhaustivelyEnforced) {
  const MultiChannelRecord& r = first_of(ClusterLabel::Cluster, 3);
  const Box box = gt_box(r);
  for (StartState s : {StartState::Fresh, StartState::Boxed, StartState::Proposed, StartState::Rejected,
                       StartState::Accepted}) {
    for (Op op : {Op::SetBox, Op::Propose, Op::Accept, Op::Reject}) {
      testing::TempDir work("annot_sm");
      const auto store = open_store(work.path());
      if (s != StartState::Fresh) store->set_box(r.id, box);
      if (s == StartState::Proposed || s == StartState::Rejected || s == StartState::Accepted) store->propose(r.id, std::nullopt);
      if (s == StartState::Rejected) store->reject(r.id);
      if (s == StartState::Accepted) store->accept(r.id);
      const std::string before = to_json(store->get(r.id)).dump();

      const Expectation e = expected(s, op);
      SCOPED_TRACE(fmt::format("state {} op {}", static_cast<int>(s), static_cast<int>(op)));
      try {
        AnnotationTask t;
        switch (op) {
          case Op::SetBox: t = store->set_box(r.id, box); break;
          case Op::Propose: t = store->propose(r.id, s == StartState::Fresh ? std::optional<Box>(box) : std::nullopt); break;
          case Op::Accept: t = store->accept(r.id); break;
          case Op::Reject: t = store->reject(r.id); break;
        }
        ASSERT_TRUE(e.status.has_value()) << "transition should have failed";
        EXPECT_EQ(t.status, *e.status);
        EXPECT_EQ(t.proposal.has_value(), t.status != TaskStatus::Pending);
      } catch (const Error& err) {
        ASSERT_TRUE(e.error.has_value()) << err.what();
        EXPECT_EQ(err.code(), *e.error);
        EXPECT_EQ(to_json(store->get(r.id)).dump(), before) << "failed transition changed the task";
      }
    }
  }
}

TEST_F(AnnotateTest, JournalReplayRestoresState) {
  testing::TempDir work("annot_replay");
  std::vector<std::string> before;
  {
    const auto store = open_store(work.path());
    const MultiChannelRecord& a = first_of(ClusterLabel::Cluster, 0);
    const MultiChannelRecord& b = first_of(ClusterLabel::Cluster, 1);
    const MultiChannelRecord& c = first_of(ClusterLabel::Cluster, 2);
    store->propose(a.id, gt_box(a), "x");
    store->accept(a.id, "y");
    store->propose(b.id, gt_box(b));
    store->reject(b.id);
    store->set_box(c.id, gt_box(c));
    for (const auto& t : store->review_queue()) before.push_back(to_json(t).dump());
  }
  // A crash in the middle of an append leaves a partial last line.
  {
    std::ofstream j(work / "journal.jsonl", std::ios::app | std::ios::binary);
    j << R"({"event":"accept","id":")";
  }
  const auto reopened = open_store(work.path());
  std::vector<std::string> after;
  for (const auto& t : reopened->review_queue()) after.push_back(to_json(t).dump());
  EXPECT_EQ(after, before);
  // Appends continue on a clean line.
  const MultiChannelRecord& d = first_of(ClusterLabel::Cluster, 3);
  reopened->set_box(d.id, gt_box(d));
  const auto again = open_store(work.path());
  EXPECT_EQ(again->get(d.id).box, gt_box(d));
}

TEST_F(AnnotateTest, CorruptJournalLineIsReported) {
  testing::TempDir work("annot_corrupt");
  {
    std::ofstream j(work / "journal.jsonl", std::ios::binary);
    j << "not json\n";
  }
  EXPECT_EQ(code_of([&] { open_store(work.path()); }), ErrorCode::MalformedLine);
}

TEST_F(AnnotateTest, ConcurrentProposalsKeepJournalLinesIntact) {
  testing::TempDir work("annot_conc");
  const auto store = open_store(work.path());
  std::vector<const MultiChannelRecord*> clusters;
  for (int k = 0; k < 8; ++k) clusters.push_back(&first_of(ClusterLabel::Cluster, k));
  std::vector<std::thread> threads;
  for (const auto* r : clusters) {
    threads.emplace_back([&, r] {
      store->propose(r->id, gt_box(*r));
      store->accept(r->id, "rev");
    });
  }
  for (auto& t : threads) t.join();
  std::ifstream in(store->journal_path());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const json e = json::parse(line);
    EXPECT_TRUE(e.contains("seq"));
    ++n;
  }
  EXPECT_EQ(n, 24);  // box + propose + accept per record
  for (const auto* r : clusters) EXPECT_EQ(store->get(r->id).status, TaskStatus::Accepted);
}

TEST(AnnotateQueue, LargeDatasetStartsFullyPending) {
  testing::TempDir dir("annot_372");
  ImageRGB img(16, 16);
  write_png(dir / "img.png", img);
  std::vector<MultiChannelRecord> records(372);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].id = fmt::format("r{:03d}", i);
    records[i].brightfield = dir / "img.png";
  }
  TaskStore store(records, dir / "work", std::make_shared<ClassicalSegmenter>());
  const auto q = store.review_queue();
  EXPECT_EQ(q.size(), 372u);
  EXPECT_TRUE(std::all_of(q.begin(), q.end(), [](const auto& t) { return t.status == TaskStatus::Pending; }));
  TaskStore empty({}, dir / "work_empty", std::make_shared<ClassicalSegmenter>());
  EXPECT_TRUE(empty.review_queue().empty());
}

TEST(PolygonJson, RoundTripsAndRejectsMalformed) {
  const Polygon p{{{0.1, 0.2}, {0.5, 0.25}, {0.3, 0.9}}};
  const json j = polygon_to_json(p);
  EXPECT_EQ(j.dump(), R"({"points":[[0.1,0.2],[0.5,0.25],[0.3,0.9]]})");
  const Polygon back = polygon_from_json(j);
  ASSERT_EQ(back.vertices.size(), 3u);
  EXPECT_EQ(back.vertices[1].x, 0.5);
  EXPECT_THROW(polygon_from_json(json::parse(R"({"pts":[]})")), Error);
  EXPECT_THROW(polygon_from_json(json::parse(R"({"points":[[1]]})")), Error);
}

/// Live server on an ephemeral port.
class ServerTest : public AnnotateTest {
 protected:
  void SetUp() override {
    work_ = std::make_unique<testing::TempDir>("annot_http");
    static_ = std::make_unique<testing::TempDir>("annot_static");
    {
      std::ofstream f(static_->path() / "index.html");
      f << "<!doctype html><title>annotate</title>";
    }
    store_ = open_store(work_->path());
    server_ = std::make_unique<AnnotateServer>(*store_, ServerOptions{static_->path()});
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->run(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 100 && !client_->Get("/tasks"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  json post(const std::string& path, const json& body, int expected_status) {
    auto res = client_->Post(path.c_str(), body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected_status) << path << " " << res->body;
    return json::parse(res->body);
  }

  std::unique_ptr<testing::TempDir> work_;
  std::unique_ptr<testing::TempDir> static_;
  std::unique_ptr<TaskStore> store_;
  std::unique_ptr<AnnotateServer> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_{0};
};

TEST_F(ServerTest, ScriptedSessionProducesAccurateLabel) {
  const MultiChannelRecord& r = first_of(ClusterLabel::Cluster, 4);
  auto res = client_->Get("/tasks");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  json tasks = json::parse(res->body);
  EXPECT_EQ(tasks["counts"]["pending"], 21);
  EXPECT_EQ(tasks["tasks"].size(), 21u);

  // Normalized box drawn around the cluster, as the browser sends it.
  const Box b = gt_box(r);
  const json box = {{"box", {(b.x - 3) / 224.0, (b.y - 3) / 224.0, (b.w + 6) / 224.0, (b.h + 6) / 224.0}},
                    {"normalized", true}};
  const json boxed = post("/tasks/" + r.id + "/box", box, 200);
  EXPECT_EQ(boxed["task"]["status"], "pending");
  const json proposed = post("/tasks/" + r.id + "/propose", {{"annotator", "a1"}}, 200);
  EXPECT_EQ(proposed["task"]["status"], "proposed");
  const Polygon poly = polygon_from_json(proposed["polygon"]);
  for (const auto& v : poly.vertices) {
    EXPECT_GE(v.x, 0.0);
    EXPECT_LE(v.x, 1.0);
  }
  const json accepted = post("/tasks/" + r.id + "/accept", {{"reviewer", "r2"}}, 200);
  EXPECT_EQ(accepted["task"]["status"], "accepted");
  EXPECT_EQ(accepted["task"]["reviewer"], "r2");
  const auto labels = load_seg_labels(accepted["label_file"].get<std::string>());
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_GE(iou(rasterize_polygon(labels[0].polygon, 224, 224), gt_mask(r)), 0.9);

  res = client_->Get("/tasks");
  tasks = json::parse(res->body);
  EXPECT_EQ(tasks["counts"]["pending"], 20);
  EXPECT_EQ(tasks["counts"]["accepted"], 1);
  EXPECT_EQ(tasks["tasks"].back()["id"], r.id);
}

TEST_F(ServerTest, ErrorsCarryCodeAndStatus) {
  const MultiChannelRecord& r = first_of(ClusterLabel::Cluster, 5);
  json e = post("/tasks/" + r.id + "/accept", json::object(), 409);
  EXPECT_EQ(e["error"]["code"], "InvalidTransition");
  e = post("/tasks/missing/reject", json::object(), 404);
  EXPECT_EQ(e["error"]["code"], "NotFound");
  e = post("/tasks/" + r.id + "/propose", {{"box", {200, 200, 50, 50}}}, 422);
  EXPECT_EQ(e["error"]["code"], "BoxOutOfBounds");
  const MultiChannelRecord& blank = first_of(ClusterLabel::NonCluster, 6);
  e = post("/tasks/" + blank.id + "/propose", {{"box", {40, 40, 100, 100}}}, 422);
  EXPECT_EQ(e["error"]["code"], "EmptyProposal");
  auto res = client_->Post(("/tasks/" + r.id + "/box").c_str(), "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["error"]["code"], "InvalidArgument");
  e = post("/tasks/" + r.id + "/box", json::object(), 400);
  EXPECT_EQ(e["error"]["code"], "InvalidArgument");
}

TEST_F(ServerTest, ServesChannelImagesAndStaticAssets) {
  const MultiChannelRecord& r = first_of(ClusterLabel::Cluster, 0);
  for (const char* ch : {"bf", "cd61", "cd45", "brightfield"}) {
    auto res = client_->Get(("/images/" + r.id + "/" + ch).c_str());
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200) << ch;
    EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
    testing::TempDir tmp("annot_png");
    {
      std::ofstream f(tmp / "x.png", std::ios::binary);
      f << res->body;
    }
    const ImageRGB got = read_image(tmp / "x.png");
    const ImageRGB want = read_image(*r.channel_path(*parse_channel(ch)));
    EXPECT_TRUE(std::equal(got.bytes().begin(), got.bytes().end(), want.bytes().begin(), want.bytes().end()));
  }
  auto res = client_->Get(("/images/" + r.id + "/cd99").c_str());
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  res = client_->Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->body.find("annotate"), std::string::npos);
}

}  // namespace
}  // namespace ccc
