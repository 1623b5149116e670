#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccc/phenotype/phenotype.hpp"
#include "ccc/preprocess/preprocess.hpp"
#include "ccc/synth/synth.hpp"

namespace ccc {

/// Machine-readable report plus its human rendering. `exit_code` is 1 when
/// the command completed but some inputs failed.
struct CommandResult {
  nlohmann::json report;
  std::string table;
  int exit_code{0};
  std::vector<std::string> warnings;
};

/// Every regular file in `input` (name order) padded and resized to
/// 224x224, written as `output`/<stem>.png. Unreadable files are listed
/// under "failures".
CommandResult cmd_preprocess(const std::filesystem::path& input, const std::filesystem::path& output);

/// Five augmented variants per image in `input`, written as
/// <stem>_aug<k>.png.
CommandResult cmd_augment(const std::filesystem::path& input, const std::filesystem::path& output,
                          std::uint64_t seed, const AugmentParams& params = {});

/// Fold assignment of every manifest record.
CommandResult cmd_split(const std::filesystem::path& manifest, int k, std::uint64_t seed);

/// Classifier backend names accepted by cmd_crossval: everything
/// make_classifier accepts, plus "oracle", which predicts each record's own
/// label.
CommandResult cmd_crossval(const std::filesystem::path& manifest, int k, std::uint64_t seed,
                           const std::string& backend);

/// Segmenter backends: everything make_segmenter accepts, plus "echo",
/// which returns each record's ground-truth masks. Only records with
/// ground-truth polygons are evaluated.
CommandResult cmd_segeval(const std::filesystem::path& manifest, const std::string& backend);

enum class MaskSource { GroundTruth, Classical };

/// One decision per cluster record. Report keys: "decisions" (array of
/// per-record objects), "summary".
CommandResult cmd_phenotype(const std::filesystem::path& manifest, const PhenotypeParams& params,
                            MaskSource masks = MaskSource::GroundTruth);

/// Threshold grid over the cluster records of `manifest`. When `out_dir`
/// is set, writes sweep.csv and areas.csv there.
CommandResult cmd_sweep(const std::filesystem::path& manifest,
                        const std::optional<std::filesystem::path>& out_dir = std::nullopt);

CommandResult cmd_synth(const std::filesystem::path& out_dir, const DatasetOptions& options);

}  // namespace ccc
