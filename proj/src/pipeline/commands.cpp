#include "ccc/pipeline/commands.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>

#include <fmt/format.h>

#include "ccc/dataset/labels.hpp"
#include "ccc/dataset/manifest.hpp"
#include "ccc/dataset/split.hpp"
#include "ccc/error.hpp"
#include "ccc/eval/metrics.hpp"
#include "ccc/eval/report.hpp"
#include "ccc/imaging/image_io.hpp"
#include "ccc/imaging/mask_ops.hpp"
#include "ccc/imaging/raster.hpp"
#include "ccc/inference/backends.hpp"

namespace ccc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<fs::path> list_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

/// Runs body(i) for i in [0, n) in parallel; the first exception is
/// rethrown after the loop.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  std::exception_ptr failure;
  std::mutex m;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(m);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

json error_json(const std::string& what, const fs::path& file) {
  return {{"file", file.string()}, {"error", what}};
}

std::string percent(double v) { return fmt::format("{:.2f}", 100.0 * v); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

}  // namespace

CommandResult cmd_preprocess(const fs::path& input, const fs::path& output) {
  const auto files = list_files(input);
  ensure_dir(output);
  std::vector<std::optional<std::string>> errors(files.size());
  std::vector<fs::path> written(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    try {
      const ImageRGB out = standardize(read_image(files[i]));
      written[i] = output / (files[i].stem().string() + ".png");
      write_png(written[i], out);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  CommandResult res;
  json outputs = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (errors[i]) {
      failures.push_back(error_json(*errors[i], files[i]));
      res.warnings.push_back(fmt::format("{}: {}", files[i].string(), *errors[i]));
    } else {
      outputs.push_back(written[i].string());
    }
  }
  res.report = {{"command", "preprocess"},
                {"size", kStandardSize},
                {"inputs", files.size()},
                {"written", outputs},
                {"failures", failures}};
  res.table = fmt::format("preprocess: {} of {} images written at {}x{}, {} failed\n", outputs.size(), files.size(),
                          kStandardSize, kStandardSize, failures.size());
  for (const auto& f : failures) res.table += fmt::format("  FAILED {}: {}\n", f["file"].get<std::string>(), f["error"].get<std::string>());
  res.exit_code = failures.empty() ? 0 : 1;
  return res;
}

CommandResult cmd_augment(const fs::path& input, const fs::path& output, std::uint64_t seed,
                          const AugmentParams& params) {
  const auto files = list_files(input);
  ensure_dir(output);
  CommandResult res;
  std::vector<NamedImage> images;
  json failures = json::array();
  for (const auto& f : files) {
    try {
      images.push_back({f.stem().string(), read_image(f)});
    } catch (const Error& e) {
      failures.push_back(error_json(e.what(), f));
      res.warnings.push_back(fmt::format("{}: {}", f.string(), e.what()));
    }
  }
  const auto variants = expand_fivefold(images, seed, params);
  std::vector<std::string> names(variants.size());
  parallel_for(variants.size(), [&](std::size_t i) {
    const auto& v = variants[i];
    names[i] = fmt::format("{}_aug{}.png", v.source_id, v.variant);
    write_png(output / names[i], v.image);
  });
  res.report = {{"command", "augment"},
                {"seed", seed},
                {"inputs", images.size()},
                {"factor", kExpansionFactor},
                {"written", names},
                {"failures", failures}};
  res.table = fmt::format("augment: {} images x {} variants = {} files, {} failed\n", images.size(),
                          kExpansionFactor, names.size(), failures.size());
  res.exit_code = failures.empty() ? 0 : 1;
  return res;
}

CommandResult cmd_split(const fs::path& manifest, int k, std::uint64_t seed) {
  const auto records = read_manifest(manifest, false);
  const FoldSplit split = kfold_split(records, k, seed);
  CommandResult res;
  json folds = json::array();
  res.table = fmt::format("{:>4}  {:>7}  {:>11}  {:>7}  {:>5}\n", "fold", "cluster", "non-cluster", "unknown", "total");
  for (int f = 0; f < k; ++f) {
    std::map<std::string, int> counts{{"cluster", 0}, {"non-cluster", 0}, {"unknown", 0}};
    json ids = json::array();
    for (std::size_t i : split.validation(f)) {
      ids.push_back(records[i].id);
      ++counts[std::string(to_string(records[i].cluster_label))];
    }
    res.table += fmt::format("{:>4}  {:>7}  {:>11}  {:>7}  {:>5}\n", f, counts["cluster"], counts["non-cluster"],
                             counts["unknown"], ids.size());
    folds.push_back({{"fold", f}, {"size", ids.size()}, {"counts", counts}, {"validation", ids}});
  }
  res.report = {{"command", "split"}, {"k", k}, {"seed", seed}, {"records", records.size()}, {"folds", folds}};
  return res;
}

CommandResult cmd_crossval(const fs::path& manifest, int k, std::uint64_t seed, const std::string& backend) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, fmt::format("k must be >= 2, got {}", k));
  std::vector<MultiChannelRecord> records;
  std::size_t skipped = 0;
  for (auto& r : read_manifest(manifest, false)) {
    if (r.cluster_label == ClusterLabel::Unknown) {
      ++skipped;
    } else {
      records.push_back(std::move(r));
    }
  }
  const FoldSplit split = kfold_split(records, k, seed);

  std::unique_ptr<Classifier> clf;
  if (backend != "oracle") clf = make_classifier(backend);
  std::vector<ClusterLabel> predicted(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    predicted[i] = clf ? clf->classify(standardize(read_image(records[i].brightfield))).label : records[i].cluster_label;
  });

  CommandResult res;
  if (skipped > 0) res.warnings.push_back(fmt::format("{} records without a cluster label were skipped", skipped));
  std::vector<ClassificationMetrics> per_fold;
  json folds = json::array();
  for (int f = 0; f < k; ++f) {
    ConfusionCounts c;
    for (std::size_t i : split.validation(f)) {
      c.add(records[i].cluster_label == ClusterLabel::Cluster, predicted[i] == ClusterLabel::Cluster);
    }
    per_fold.push_back(classification_metrics(c));
    folds.push_back({{"fold", f}, {"confusion", to_json(c)}, {"metrics", to_json(per_fold.back())}});
  }
  const FoldAggregate agg = aggregate_folds(per_fold);
  res.report = {{"command", "crossval"}, {"k", k},         {"seed", seed},         {"backend", backend},
                {"records", records.size()}, {"skipped", skipped}, {"folds", folds}, {"aggregate", to_json(agg)}};
  res.table = render_fold_table(per_fold, agg);
  return res;
}

CommandResult cmd_segeval(const fs::path& manifest, const std::string& backend) {
  const auto records = read_manifest(manifest);
  std::vector<const MultiChannelRecord*> labelled;
  for (const auto& r : records) {
    if (!r.polygons.empty()) labelled.push_back(&r);
  }
  if (labelled.empty()) throw Error(ErrorCode::EmptyEvaluation, "no record in the manifest has ground-truth polygons");

  std::unique_ptr<Segmenter> seg;
  if (backend != "echo") seg = make_segmenter(backend);
  std::vector<ImageEval> images(labelled.size());
  parallel_for(labelled.size(), [&](std::size_t i) {
    const MultiChannelRecord& r = *labelled[i];
    const ImageRGB img = read_image(r.brightfield);
    for (const auto& p : r.polygons) images[i].gts.push_back(rasterize_polygon(p.polygon, img.width(), img.height()));
    if (seg) {
      images[i].preds = seg->segment(img);
    } else {
      for (const auto& g : images[i].gts) images[i].preds.push_back(make_instance(g, 1.0));
    }
  });
  const SegEvalReport r = evaluate_segmentation(images);
  CommandResult res;
  res.report = to_json(r);
  res.report["command"] = "segeval";
  res.report["backend"] = backend;
  res.report["median_best_iou"] = median(r.best_iou_per_gt);
  res.table = render_segeval_table(r);
  return res;
}

namespace {

BinaryMask classical_cluster_mask(const MultiChannelRecord& r) {
  const auto preds = classical_fallback_segment(read_image(r.brightfield));
  if (preds.empty()) throw Error(ErrorCode::EmptyClusterMask, "classical segmentation found no cluster");
  return preds.front().mask;
}

std::vector<PhenotypeInput> load_inputs(const std::vector<const MultiChannelRecord*>& recs, MaskSource masks,
                                        std::vector<std::vector<std::string>>& warnings) {
  std::vector<PhenotypeInput> inputs(recs.size());
  warnings.assign(recs.size(), {});
  parallel_for(recs.size(), [&](std::size_t i) {
    inputs[i] = load_phenotype_input(*recs[i], &warnings[i]);
    if (masks == MaskSource::Classical) inputs[i].cluster = classical_cluster_mask(*recs[i]);
  });
  return inputs;
}

std::vector<const MultiChannelRecord*> cluster_records(const std::vector<MultiChannelRecord>& records) {
  std::vector<const MultiChannelRecord*> out;
  for (const auto& r : records) {
    if (r.cluster_label == ClusterLabel::Cluster) out.push_back(&r);
  }
  return out;
}

std::optional<Channel> outside_channel(const MultiChannelRecord& r) {
  for (const auto& tag : r.artifacts) {
    if (tag.rfind("stain_outside:", 0) == 0) return parse_channel(tag.substr(14));
  }
  return std::nullopt;
}

}  // namespace

CommandResult cmd_phenotype(const fs::path& manifest, const PhenotypeParams& params, MaskSource masks) {
  const auto records = read_manifest(manifest);
  const auto recs = cluster_records(records);
  std::vector<std::optional<PhenotypeDecision>> decisions(recs.size());
  std::vector<std::optional<std::string>> errors(recs.size());
  std::vector<std::vector<std::string>> warnings(recs.size());
  parallel_for(recs.size(), [&](std::size_t i) {
    try {
      PhenotypeInput in = load_phenotype_input(*recs[i], &warnings[i]);
      if (masks == MaskSource::Classical) in.cluster = classical_cluster_mask(*recs[i]);
      decisions[i] = phenotype_record(in.cluster, in.cd61 ? &*in.cd61 : nullptr, in.cd45 ? &*in.cd45 : nullptr, params);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  CommandResult res;
  json lines = json::array();
  json failures = json::array();
  std::map<std::string, int> counts;
  for (Phenotype p : {Phenotype::RBC, Phenotype::PLT, Phenotype::WBC, Phenotype::WBC_PLT, Phenotype::Indeterminate}) {
    counts[std::string(to_label_string(p))] = 0;
  }
  std::size_t scored = 0, correct = 0, outside = 0, outside_flagged = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const MultiChannelRecord& r = *recs[i];
    for (const auto& w : warnings[i]) res.warnings.push_back(w);
    if (errors[i]) {
      failures.push_back({{"id", r.id}, {"error", *errors[i]}});
      res.warnings.push_back(fmt::format("record {}: {}", r.id, *errors[i]));
      continue;
    }
    const PhenotypeDecision& d = *decisions[i];
    lines.push_back(to_json(r.id, d));
    ++counts[std::string(to_label_string(d.phenotype))];
    if (const auto expected = expected_phenotype(r)) {
      ++scored;
      correct += d.phenotype == *expected ? 1 : 0;
    }
    if (const auto ch = outside_channel(r)) {
      ++outside;
      const ChannelAssessment& a = *ch == Channel::CD61 ? d.cd61 : d.cd45;
      outside_flagged += a.state == ChannelState::Artifact ? 1 : 0;
    }
  }
  json summary = {{"records", recs.size()},
                  {"decided", lines.size()},
                  {"failed", failures.size()},
                  {"phenotypes", counts},
                  {"scored", scored},
                  {"correct", correct},
                  {"accuracy", scored ? json(static_cast<double>(correct) / static_cast<double>(scored)) : json(nullptr)},
                  {"stain_outside_records", outside},
                  {"stain_outside_flagged", outside_flagged},
                  {"tau", params.tau},
                  {"v_x", params.v_x},
                  {"masks", masks == MaskSource::GroundTruth ? "gt" : "classical"}};
  res.report = {{"command", "phenotype"}, {"summary", summary}, {"decisions", lines}, {"failures", failures}};

  res.table = fmt::format("phenotype: tau={} v_x={} records={}\n", params.tau, params.v_x, recs.size());
  for (const auto& [name, n] : counts) res.table += fmt::format("  {:<14} {:>6}\n", name, n);
  if (scored) {
    res.table += fmt::format("  accuracy       {:>6}% ({}/{})\n", percent(static_cast<double>(correct) / scored), correct, scored);
  }
  if (outside) res.table += fmt::format("  stain_outside flagged {}/{}\n", outside_flagged, outside);
  res.exit_code = failures.empty() ? 0 : 1;
  return res;
}

CommandResult cmd_sweep(const fs::path& manifest, const std::optional<fs::path>& out_dir) {
  const auto records = read_manifest(manifest);
  const auto recs = cluster_records(records);
  std::vector<std::vector<std::string>> warnings;
  const auto inputs = load_inputs(recs, MaskSource::GroundTruth, warnings);
  const SweepResult s = sweep_thresholds(inputs);

  CommandResult res;
  for (const auto& w : warnings)
    for (const auto& line : w) res.warnings.push_back(line);
  res.report = to_json(s);
  res.report["command"] = "sweep";
  json best = json::array();
  for (std::size_t v = 0; v < s.v_values.size(); ++v) {
    std::size_t arg = 0;
    for (std::size_t t = 1; t < s.taus.size(); ++t)
      if (s.accuracy[t][v] > s.accuracy[arg][v]) arg = t;
    best.push_back({{"v_x", s.v_values[v]}, {"tau", s.taus[arg]}, {"accuracy", s.accuracy[arg][v]}});
  }
  res.report["best"] = best;
  if (out_dir) {
    ensure_dir(*out_dir);
    write_text(*out_dir / "sweep.csv", sweep_csv(s));
    write_text(*out_dir / "areas.csv", area_csv(s));
  }

  res.table = fmt::format("{:>6}", "tau");
  for (int v : s.v_values) res.table += fmt::format("  {:>8}", fmt::format("v_x={}", v));
  res.table += "\n";
  for (std::size_t t = 0; t < s.taus.size(); ++t) {
    res.table += fmt::format("{:>6.2f}", s.taus[t]);
    for (std::size_t v = 0; v < s.v_values.size(); ++v) res.table += fmt::format("  {:>7}%", percent(s.accuracy[t][v]));
    res.table += "\n";
  }
  res.table += fmt::format("\n{:>6}  {:>14}  {:>14}\n", "v_x", "mean_area_cd61", "mean_area_cd45");
  for (std::size_t v = 0; v < s.v_values.size(); ++v) {
    res.table += fmt::format("{:>6}  {:>14.1f}  {:>14.1f}\n", s.v_values[v], s.mean_area_cd61[v], s.mean_area_cd45[v]);
  }
  return res;
}

CommandResult cmd_synth(const fs::path& out_dir, const DatasetOptions& o) {
  const DatasetSummary s = generate_dataset(out_dir, o);
  CommandResult res;
  res.report = {{"command", "synth"},
                {"manifest", s.manifest.string()},
                {"records", s.records},
                {"digest", s.digest},
                {"n_per_category", o.n_per_category},
                {"seed", o.seed},
                {"noise_sigma", o.noise_sigma},
                {"halo_width", o.halo_width},
                {"artifact_rate", o.artifact_rate},
                {"straddle_rate", o.straddle_rate}};
  res.table = fmt::format("synth: {} records -> {} (digest {})\n", s.records, s.manifest.string(), s.digest);
  return res;
}

}  // namespace ccc
