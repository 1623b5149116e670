// Command-line entry point. Reports go to stdout as JSON followed by a
// table; warnings and errors go to stderr.
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ccc/annotate/server.hpp"
#include "ccc/error.hpp"
#include "ccc/inference/backends.hpp"
#include "ccc/pipeline/commands.hpp"
#include "ccc/util.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// key=value lines; '#' starts a comment. Keys may be scoped to one
/// subcommand as "<subcommand>.<key>".
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

/// Inserts config values as flags for every option the command line does
/// not already set, so explicit flags always win.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) {
    if (const char* env = std::getenv("CCC_CONFIG"); env && *env) path = env;
  }
  if (!path) return args;

  std::size_t sub_pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size() && !sub; ++i) {
    for (CLI::App* s : app.get_subcommands([](CLI::App*) { return true; })) {
      if (s->get_name() == args[i]) {
        sub = s;
        sub_pos = i;
      }
    }
  }
  std::vector<std::string> global, local;
  for (const auto& [raw_key, value] : read_config(*path)) {
    std::string key = raw_key;
    CLI::App* scope = nullptr;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      if (!sub || key.substr(0, dot) != sub->get_name()) continue;
      key = key.substr(dot + 1);
      scope = sub;
    }
    const std::string flag = "--" + key;
    if (given_on_command_line(args, flag)) continue;
    if (scope == nullptr && app.get_option_no_throw(flag) != nullptr) {
      if (key != "config") global.insert(global.end(), {flag, value});
    } else if (sub && sub->get_option_no_throw(flag) != nullptr) {
      local.insert(local.end(), {flag, value});
    } else if (scope != nullptr) {
      throw UsageError("unknown config key '" + raw_key + "'");
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(std::min(sub_pos, args.size())));
  out.insert(out.end(), global.begin(), global.end());
  if (sub_pos < args.size()) {
    out.push_back(args[sub_pos]);
    out.insert(out.end(), local.begin(), local.end());
    out.insert(out.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
  }
  return out;
}

void emit(const ccc::CommandResult& r, const std::string& report_path) {
  for (const auto& w : r.warnings) spdlog::warn("{}", w);
  std::cout << r.report.dump(2) << "\n\n" << r.table << std::flush;
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    out << r.report.dump(2) << "\n";
    if (!out) throw ccc::Error(ccc::ErrorCode::Io, "cannot write " + report_path);
  }
}

int exit_code_for(ccc::ErrorCode c) {
  return c == ccc::ErrorCode::InvalidArgument || c == ccc::ErrorCode::InvalidSpec ? kExitUsage : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_logger_mt("ccc"));
  spdlog::set_pattern("%l: %v");

  CLI::App app{"Circulating cell cluster analysis: classification, segmentation and phenotyping."};
  app.name("ccc");
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string config;
  std::string log_level = "warn";
  std::string report_path;
  app.add_option("--threads", threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--config", config, "key=value config file (or set CCC_CONFIG); flags override it");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_option("--report", report_path, "Also write the JSON report to this file");

  std::string input, output, manifest, backend = "classical", out_dir, jsonl, masks = "gt";
  std::uint64_t seed = 0;
  int k = 5;

  auto* pre = app.add_subcommand("preprocess", "Pad to square and resize every image to 224x224");
  pre->add_option("--input", input, "Directory of input images")->required()->check(CLI::ExistingDirectory);
  pre->add_option("--output", output, "Output directory")->required();

  ccc::AugmentParams aug;
  auto* augc = app.add_subcommand("augment", "Write five augmented variants per image");
  augc->add_option("--input", input)->required()->check(CLI::ExistingDirectory);
  augc->add_option("--output", output)->required();
  augc->add_option("--seed", seed, "Base seed")->capture_default_str();
  augc->add_option("--crop-min", aug.crop_scale_min)->capture_default_str()->check(CLI::Range(0.01, 1.0));
  augc->add_option("--crop-max", aug.crop_scale_max)->capture_default_str()->check(CLI::Range(0.01, 1.0));
  augc->add_option("--rotation", aug.rotation_max_deg, "Max rotation in degrees")->capture_default_str()->check(CLI::Range(0.0, 360.0));
  augc->add_option("--hflip", aug.hflip)->capture_default_str();
  augc->add_option("--vflip", aug.vflip)->capture_default_str();
  augc->add_option("--brightness", aug.brightness)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  augc->add_option("--contrast", aug.contrast)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  augc->add_option("--saturation", aug.saturation)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  augc->add_option("--hue", aug.hue, "Max hue shift in half-degrees")->capture_default_str()->check(CLI::Range(0, 90));
  augc->add_option("--blur", aug.blur_sigma, "Max Gaussian sigma")->capture_default_str()->check(CLI::Range(0.0, 10.0));

  auto* split = app.add_subcommand("split", "Stratified k-fold assignment of a manifest");
  split->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  split->add_option("--k", k, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000));
  split->add_option("--seed", seed)->capture_default_str();

  auto* cv = app.add_subcommand("crossval", "Per-fold and aggregate cluster classification metrics");
  cv->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  cv->add_option("--k", k)->capture_default_str()->check(CLI::Range(2, 1000));
  cv->add_option("--seed", seed)->capture_default_str();
  cv->add_option("--backend", backend, "classical | oracle | stub:<label>[:<score>] | onnx:<path>")->capture_default_str();

  auto* seg = app.add_subcommand("segeval", "Mask and box mAP of a segmenter against ground truth");
  seg->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  seg->add_option("--backend", backend, "classical | echo | onnx:<path>")->capture_default_str();

  ccc::PhenotypeParams pp;
  auto* ph = app.add_subcommand("phenotype", "Phenotype every cluster record from its stain channels");
  ph->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  ph->add_option("--tau", pp.tau, "Overlap threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  ph->add_option("--v-x", pp.v_x, "Lower V bound of the stain ranges")->capture_default_str()->check(CLI::Range(0, 255));
  ph->add_option("--min-stain-area", pp.min_stain_area)->capture_default_str();
  ph->add_option("--masks", masks, "Cluster masks: gt (label polygons) or classical")
      ->capture_default_str()
      ->check(CLI::IsMember({"gt", "classical"}));
  ph->add_option("--jsonl", jsonl, "Write one decision per line to this file");

  auto* sw = app.add_subcommand("sweep", "Accuracy grid over (tau, v_x) plus mean stain areas");
  sw->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  sw->add_option("--out-dir", out_dir, "Write sweep.csv and areas.csv here");

  ccc::DatasetOptions dso;
  auto* sy = app.add_subcommand("synth", "Generate a synthetic multi-channel dataset");
  sy->add_option("--output", output)->required();
  sy->add_option("--n", dso.n_per_category, "Records per category (7 categories)")->capture_default_str()->check(CLI::PositiveNumber);
  sy->add_option("--seed", dso.seed)->capture_default_str();
  sy->add_option("--noise-sigma", dso.noise_sigma)->capture_default_str()->check(CLI::Range(0.0, 64.0));
  sy->add_option("--halo-width", dso.halo_width, "Dim stain fringe width in pixels (0 = none)")->capture_default_str()->check(CLI::Range(0, 32));
  sy->add_option("--artifact-rate", dso.artifact_rate)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  sy->add_option("--straddle-rate", dso.straddle_rate)->capture_default_str()->check(CLI::Range(0.0, 1.0));

  std::string host = "127.0.0.1", work_dir, static_dir;
  int port = 8080;
  auto* sv = app.add_subcommand("serve", "Run the annotation HTTP service");
  sv->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  sv->add_option("--work-dir", work_dir, "Journal and accepted labels")->required();
  sv->add_option("--host", host)->capture_default_str();
  sv->add_option("--port", port)->capture_default_str()->check(CLI::Range(0, 65535));
  sv->add_option("--static-dir", static_dir, "Browser client assets")->check(CLI::ExistingDirectory);
  sv->add_option("--backend", backend, "Proposal segmenter: classical | onnx:<path>")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  ccc::set_num_threads(threads);

  try {
    ccc::CommandResult r;
    if (*pre) {
      r = ccc::cmd_preprocess(input, output);
    } else if (*augc) {
      r = ccc::cmd_augment(input, output, seed, aug);
    } else if (*split) {
      r = ccc::cmd_split(manifest, k, seed);
    } else if (*cv) {
      r = ccc::cmd_crossval(manifest, k, seed, backend);
    } else if (*seg) {
      r = ccc::cmd_segeval(manifest, backend);
    } else if (*ph) {
      r = ccc::cmd_phenotype(manifest, pp, masks == "gt" ? ccc::MaskSource::GroundTruth : ccc::MaskSource::Classical);
      if (!jsonl.empty()) {
        std::ofstream out(jsonl, std::ios::binary);
        for (const auto& d : r.report["decisions"]) out << d.dump() << "\n";
        if (!out) throw ccc::Error(ccc::ErrorCode::Io, "cannot write " + jsonl);
      }
    } else if (*sw) {
      r = ccc::cmd_sweep(manifest, out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir));
    } else if (*sy) {
      r = ccc::cmd_synth(output, dso);
    } else if (*sv) {
      auto store = ccc::TaskStore::open(manifest, work_dir, std::shared_ptr<const ccc::Segmenter>(ccc::make_segmenter(backend)));
      ccc::ServerOptions so;
      if (!static_dir.empty()) so.static_dir = static_dir;
      ccc::AnnotateServer server(*store, so);
      const int bound = server.bind(host, port);
      std::cout << nlohmann::json{{"command", "serve"}, {"url", "http://" + host + ":" + std::to_string(bound)},
                                  {"tasks", store->size()}}
                       .dump()
                << std::endl;
      server.run();
      return 0;
    }
    emit(r, report_path);
    return r.exit_code;
  } catch (const ccc::Error& e) {
    spdlog::error("{}: {}", ccc::to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
}
