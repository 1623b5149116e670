#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccc/dataset/record.hpp"
#include "ccc/imaging/image.hpp"

namespace ccc {

enum class SceneKind { Cluster, SingleCell, MultiSeparated, Blank };
enum class ArtifactMode { None, StainOutside, PartialCover };

std::string_view to_string(SceneKind k);
std::string_view to_string(ArtifactMode m);

/// Overlap fraction separating a stained from an unstained channel in
/// partial-cover scenes; matches the default phenotyper tau.
inline constexpr double kCoverBoundary = 0.15;

struct SceneSpec {
  int width{224};
  int height{224};
  SceneKind kind{SceneKind::Cluster};
  /// Ground-truth phenotype; required for clusters, forbidden otherwise.
  std::optional<Phenotype> phenotype;
  /// Cluster: >= 2; single cell: 1; multi-separated: >= 2; blank: 0.
  int n_cells{3};
  ArtifactMode artifact{ArtifactMode::None};
  /// Partial-cover overlap of the partially stained channel. When unset it
  /// is drawn from [0.15, 0.20] for WBC+PLT and [0.10, 0.15) for PLT/WBC.
  /// Must be >= kCoverBoundary exactly when the phenotype is WBC+PLT.
  std::optional<double> cover_fraction;
  double noise_sigma{4.0};
  /// Width in pixels of a dim fringe painted around every stain footprint
  /// in the stain's hue with V falling from 175 to 90. The fringe lies
  /// below the default V_x on its outer part and above it on its inner
  /// part, so extracted area depends on V_x. 0 disables it; the footprint
  /// masks and cover fractions never include it.
  int halo_width{0};
  std::uint64_t seed{0};
};

struct Ellipse {
  double cx{0}, cy{0};
  double a{0}, b{0};  ///< Semi-axes, a >= b.
  double theta{0};    ///< Radians.

  bool contains(double x, double y) const noexcept;
  BinaryMask rasterize(int width, int height) const;
};

/// Generated images and their exact ground truth.
struct Scene {
  ImageRGB brightfield;
  ImageRGB cd61;
  ImageRGB cd45;
  std::vector<Ellipse> cells;
  /// Union of member cells for clusters, empty otherwise.
  BinaryMask cluster_mask;
  /// Painted stain footprints.
  BinaryMask stain_cd61;
  BinaryMask stain_cd45;
  /// Realized |cluster ∩ stain| / |cluster| per channel (clusters only).
  double cover_cd61{0.0};
  double cover_cd45{0.0};
  /// Which channel received the out-of-cluster blob, if any.
  std::optional<Channel> outside_channel;
  /// Labels and polygons filled; id and paths left empty.
  MultiChannelRecord record;
};

/// Deterministic in spec.seed. Throws InvalidSpec for inconsistent specs
/// (see SceneSpec, plus: WBC+PLT with stain_outside, RBC with
/// partial_cover, artifacts on non-cluster kinds).
Scene generate_scene(const SceneSpec& spec);

struct DatasetOptions {
  int n_per_category{10};
  std::uint64_t seed{0};
  int width{224};
  int height{224};
  double noise_sigma{4.0};
  /// Probability that a cluster scene gets an artifact (split evenly
  /// between stain_outside and partial_cover where allowed).
  double artifact_rate{0.0};
  /// Probability that a PLT/WBC/WBC+PLT scene is replaced by a partial-cover
  /// scene with overlap drawn from [0.10, 0.20]; its label is WBC+PLT iff the
  /// realized overlap is >= kCoverBoundary.
  double straddle_rate{0.0};
  /// Passed through to every SceneSpec.
  int halo_width{0};
};

struct DatasetSummary {
  std::filesystem::path manifest;
  std::size_t records{0};
  /// FNV-1a over the manifest and every written file, in manifest order.
  std::string digest;
};

/// Seven categories (four cluster phenotypes, single cell, multiple
/// separated cells, blank) times n_per_category. Writes
/// {id}_bf.png, {id}_cd61.png, {id}_cd45.png, {id}.txt (clusters only) and
/// manifest.jsonl into `dir`. Throws InvalidArgument for n < 1, Io on write
/// failure.
DatasetSummary generate_dataset(const std::filesystem::path& dir, const DatasetOptions& options);

}  // namespace ccc
