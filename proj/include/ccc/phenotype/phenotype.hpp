#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ccc/dataset/record.hpp"
#include "ccc/imaging/hsv.hpp"
#include "ccc/imaging/image.hpp"

namespace ccc {

enum class Stain { CD61, CD45 };
std::string_view to_string(Stain s);

/// CD61 (platelets) fluoresces green, CD45 (white cells) yellow.
///   green:  (35, 100, v_x) .. (85, 255, 255)
///   yellow: (20, 100, v_x) .. (40, 255, 255)
HsvRange stain_range(Stain s, int v_x);

inline constexpr double kDefaultTau = 0.15;
inline constexpr int kDefaultVx = 140;
inline constexpr std::size_t kDefaultMinStainArea = 25;

/// threshold_hsv with the stain's range, then opening with radius 1.
/// Throws InvalidArgument for v_x outside [0,255].
BinaryMask extract_stain_region(const ImageRGB& channel, Stain s, int v_x);

/// |cluster ∩ stain| / |cluster|. Throws EmptyClusterMask, DimensionMismatch.
double overlap_percent(const BinaryMask& cluster, const BinaryMask& stain);

enum class ChannelState { Absent, Valid, Artifact };
std::string_view to_string(ChannelState s);

struct ChannelAssessment {
  Stain stain{Stain::CD61};
  std::size_t stain_area{0};
  std::size_t overlap_area{0};
  std::size_t cluster_area{0};
  double overlap_percent{0.0};
  ChannelState state{ChannelState::Absent};
  /// True when the channel image was missing rather than unstained.
  bool missing{false};
};

/// absent  if stain_area < min_stain_area,
/// valid   if overlap_percent >= tau,
/// artifact otherwise.
/// Throws InvalidArgument for tau outside (0,1), plus overlap_percent's errors.
ChannelAssessment assess_channel(const BinaryMask& cluster, const BinaryMask& stain_mask, Stain s,
                                 double tau, std::size_t min_stain_area = kDefaultMinStainArea);

/// Assessment for a channel whose image is not available.
ChannelAssessment missing_channel(Stain s, std::size_t cluster_area);

/// (valid, valid) -> WBC_PLT, (valid, not valid) -> PLT, (not valid, valid)
/// -> WBC, (absent, absent) -> RBC; every other pair has an artifact and no
/// valid channel and is Indeterminate. Arguments are (cd61, cd45).
Phenotype decide(ChannelState cd61, ChannelState cd45) noexcept;

struct PhenotypeDecision {
  Phenotype phenotype{Phenotype::Indeterminate};
  ChannelAssessment cd61;
  ChannelAssessment cd45;
  double tau{kDefaultTau};
  int v_x{kDefaultVx};
};

PhenotypeDecision decide_phenotype(const ChannelAssessment& cd61, const ChannelAssessment& cd45,
                                   double tau = kDefaultTau, int v_x = kDefaultVx);

struct PhenotypeParams {
  double tau{kDefaultTau};
  int v_x{kDefaultVx};
  std::size_t min_stain_area{kDefaultMinStainArea};
};

/// Full stage-2 decision for one record. A null channel is assessed absent
/// and flagged missing. Channel images must match the cluster mask's size.
PhenotypeDecision phenotype_record(const BinaryMask& cluster, const ImageRGB* cd61, const ImageRGB* cd45,
                                   const PhenotypeParams& params = {});

nlohmann::json to_json(const ChannelAssessment& a);
/// One JSON-lines entry: record id, phenotype, both channels, parameters.
nlohmann::json to_json(const std::string& record_id, const PhenotypeDecision& d);

/// Decision a correct phenotyper should reach for a labelled record:
/// Indeterminate for excluded records, otherwise the phenotype label.
/// Returns nullopt for records without a phenotype label.
std::optional<Phenotype> expected_phenotype(const MultiChannelRecord& r);

/// Inputs of one record in memory.
struct PhenotypeInput {
  std::string id;
  BinaryMask cluster;
  std::optional<ImageRGB> cd61;
  std::optional<ImageRGB> cd45;
  std::optional<Phenotype> expected;
};

/// Reads the channel images and rasterizes the record's polygons at the
/// brightfield size. Channels whose path is unset or unreadable come back
/// empty and are reported in `warnings`.
PhenotypeInput load_phenotype_input(const MultiChannelRecord& r, std::vector<std::string>* warnings = nullptr);

inline constexpr int kSweepVx[] = {100, 140, 170};
inline constexpr double kSweepTau[] = {0.05, 0.08, 0.10, 0.13, 0.15, 0.18, 0.20, 0.30};

struct SweepResult {
  std::vector<int> v_values;
  std::vector<double> taus;
  /// accuracy[t][v] for taus[t], v_values[v].
  std::vector<std::vector<double>> accuracy;
  /// Mean extracted stain area per v_x over records that have the channel.
  std::vector<double> mean_area_cd61;
  std::vector<double> mean_area_cd45;
  std::size_t records{0};
};

/// Phenotype accuracy for every (v_x, tau) cell against each input's
/// `expected`. Stain masks are extracted once per (record, v_x).
/// Throws EmptyDataset when no input carries an expected phenotype.
SweepResult sweep_thresholds(std::span<const PhenotypeInput> inputs,
                             std::span<const int> v_values = kSweepVx,
                             std::span<const double> taus = kSweepTau,
                             std::size_t min_stain_area = kDefaultMinStainArea);

/// Rows are tau, columns v_x; header "tau,v100,v140,v170".
std::string sweep_csv(const SweepResult& r);
/// Columns v_x, mean_area_cd61, mean_area_cd45.
std::string area_csv(const SweepResult& r);
nlohmann::json to_json(const SweepResult& r);

}  // namespace ccc
