#include "ccc/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include <fmt/format.h>

#include "ccc/dataset/labels.hpp"
#include "ccc/dataset/manifest.hpp"
#include "ccc/error.hpp"
#include "ccc/imaging/hsv.hpp"
#include "ccc/imaging/image_io.hpp"
#include "ccc/imaging/mask_ops.hpp"
#include "ccc/imaging/morphology.hpp"
#include "ccc/imaging/raster.hpp"
#include "ccc/phenotype/phenotype.hpp"
#include "ccc/util.hpp"

namespace ccc {

namespace fs = std::filesystem;

std::string_view to_string(SceneKind k) {
  switch (k) {
    case SceneKind::Cluster: return "cluster";
    case SceneKind::SingleCell: return "single_cell";
    case SceneKind::MultiSeparated: return "multi_separated";
    case SceneKind::Blank: return "blank";
  }
  return "blank";
}

std::string_view to_string(ArtifactMode m) {
  switch (m) {
    case ArtifactMode::None: return "none";
    case ArtifactMode::StainOutside: return "stain_outside";
    case ArtifactMode::PartialCover: return "partial_cover";
  }
  return "none";
}

bool Ellipse::contains(double x, double y) const noexcept {
  const double dx = x - cx;
  const double dy = y - cy;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double u = (dx * c + dy * s) / a;
  const double v = (-dx * s + dy * c) / b;
  return u * u + v * v <= 1.0;
}

BinaryMask Ellipse::rasterize(int width, int height) const {
  BinaryMask m(width, height);
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - a - 1)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + a + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - a - 1)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + a + 1)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (contains(x + 0.5, y + 0.5)) m.set(x, y);
  return m;
}

namespace {

// Geometry constants, in pixels.
constexpr double kMinorMin = 12.0;
constexpr double kMinorMax = 15.0;
constexpr double kMaxElongation = 1.1;
// Parent/child centre distance as a fraction of the summed radii along the
// centre line: always overlapping, with a neck well below a cell radius.
constexpr double kContactMin = 0.88;
constexpr double kContactMax = 0.95;
constexpr double kSeparatedGap = 5.0;
constexpr double kCanvasMargin = 10.0;
constexpr int kOutsideClearance = 6;
constexpr std::uint8_t kStainMinV = 180;
constexpr std::uint8_t kHaloMaxV = 175;
constexpr std::uint8_t kHaloMinV = 90;

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); }

Ellipse random_cell(Rng& rng, double cx, double cy) {
  Ellipse e;
  e.b = rng.uniform(kMinorMin, kMinorMax);
  e.a = e.b * rng.uniform(1.0, kMaxElongation);
  e.theta = rng.uniform(0.0, M_PI);
  e.cx = cx;
  e.cy = cy;
  return e;
}

// Distance from the centre to the boundary along direction phi.
double radius_along(const Ellipse& e, double phi) {
  const double t = phi - e.theta;
  const double c = std::cos(t);
  const double s = std::sin(t);
  return e.a * e.b / std::sqrt((e.b * c) * (e.b * c) + (e.a * s) * (e.a * s));
}

bool inside_canvas(const Ellipse& e, int w, int h) {
  return e.cx - e.a >= kCanvasMargin && e.cy - e.a >= kCanvasMargin && e.cx + e.a <= w - kCanvasMargin &&
         e.cy + e.a <= h - kCanvasMargin;
}

BinaryMask union_of(const std::vector<Ellipse>& cells, int w, int h) {
  BinaryMask m(w, h);
  for (const auto& c : cells) m = mask_union(m, c.rasterize(w, h));
  return m;
}

// A cluster grown as a tree: every new cell overlaps one earlier cell and
// keeps clear of all the others. Resampled until the union is one hole-free
// component, so its contour polygon reproduces it exactly.
std::vector<Ellipse> place_cluster(Rng& rng, int n, int w, int h) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<Ellipse> cells{random_cell(rng, w / 2.0 + rng.uniform(-10, 10), h / 2.0 + rng.uniform(-10, 10))};
    bool ok = true;
    for (int i = 1; i < n && ok; ++i) {
      ok = false;
      for (int tries = 0; tries < 200 && !ok; ++tries) {
        const std::size_t parent = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cells.size()) - 1));
        const double phi = rng.uniform(0.0, 2 * M_PI);
        Ellipse cell = random_cell(rng, 0, 0);
        const double d = rng.uniform(kContactMin, kContactMax) *
                         (radius_along(cells[parent], phi) + radius_along(cell, phi + M_PI));
        cell.cx = cells[parent].cx + d * std::cos(phi);
        cell.cy = cells[parent].cy + d * std::sin(phi);
        if (!inside_canvas(cell, w, h)) continue;
        bool clear = true;
        for (std::size_t k = 0; k < cells.size() && clear; ++k) {
          if (k == parent) continue;
          clear = std::hypot(cell.cx - cells[k].cx, cell.cy - cells[k].cy) >= cell.a + cells[k].a;
        }
        if (!clear) continue;
        cells.push_back(cell);
        ok = true;
      }
    }
    if (!ok || !inside_canvas(cells[0], w, h)) continue;
    const BinaryMask m = union_of(cells, w, h);
    const auto polys = mask_to_polygons(m);
    if (polys.size() == 1 && rasterize_polygon(polys[0], w, h) == m) return cells;
  }
  invalid("could not place a cluster on the canvas");
}

std::vector<Ellipse> place_separated(Rng& rng, int n, int w, int h) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<Ellipse> cells;
    for (int tries = 0; tries < 400 && static_cast<int>(cells.size()) < n; ++tries) {
      Ellipse cell = random_cell(rng, rng.uniform(0, w), rng.uniform(0, h));
      if (!inside_canvas(cell, w, h)) continue;
      bool clear = true;
      for (const auto& o : cells) {
        clear = clear && std::hypot(cell.cx - o.cx, cell.cy - o.cy) >= cell.a + o.a + kSeparatedGap;
      }
      if (clear) cells.push_back(cell);
    }
    if (static_cast<int>(cells.size()) == n) return cells;
  }
  invalid(fmt::format("could not place {} separated cells on a {}x{} canvas", n, w, h));
}

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

ImageRGB render_brightfield(Rng& geo, Rng& noise, const std::vector<Ellipse>& cells, int w, int h, double sigma) {
  const double bg = geo.uniform(190, 215);
  const double tint = geo.uniform(0, 6);
  ImageRGB img(w, h);
  std::vector<double> level(static_cast<std::size_t>(w) * h, bg);
  for (const auto& c : cells) {
    const double v = geo.uniform(85, 115);
    const BinaryMask m = c.rasterize(w, h);
    for (std::size_t i = 0; i < level.size(); ++i)
      if (m.bits()[i]) level[i] = v;
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double l = level[static_cast<std::size_t>(y) * w + x];
      const double n0 = sigma > 0 ? sigma * noise.normal() : 0.0;
      const double n1 = sigma > 0 ? sigma * noise.normal() : 0.0;
      const double n2 = sigma > 0 ? sigma * noise.normal() : 0.0;
      img.set(x, y, {clamp_byte(l + n0), clamp_byte(l + n1), clamp_byte(l + tint + n2)});
    }
  }
  return img;
}

// Dark fluorescence frame with stained pixels. Noise on stained pixels only
// perturbs V, which is clamped to >= kStainMinV, so hue and saturation stay
// at the drawn stain colour. Halo ring d (1-based distance from the
// footprint) gets V falling linearly from kHaloMaxV to kHaloMinV; halo noise
// stays inside that band.
ImageRGB render_fluorescence(Rng& geo, Rng& noise, const BinaryMask& stain, Stain kind, double sigma,
                             int halo) {
  const int hue = kind == Stain::CD61 ? static_cast<int>(geo.uniform_int(50, 70)) : static_cast<int>(geo.uniform_int(25, 35));
  const int sat = static_cast<int>(geo.uniform_int(200, 255));
  const int val = static_cast<int>(geo.uniform_int(200, 240));
  const double bg = geo.uniform(8, 16);
  ImageRGB img(stain.width(), stain.height());
  // ring[i]: smallest disc radius whose dilation of the footprint reaches pixel i; 0 off the halo.
  std::vector<int> ring(static_cast<std::size_t>(stain.width()) * stain.height(), 0);
  if (halo > 0 && mask_area(stain) > 0) {
    BinaryMask prev = stain;
    for (int d = 1; d <= halo; ++d) {
      BinaryMask grown = dilate(stain, d);
      for (int y = 0; y < stain.height(); ++y)
        for (int x = 0; x < stain.width(); ++x)
          if (grown.at(x, y) && !prev.at(x, y)) ring[static_cast<std::size_t>(y) * stain.width() + x] = d;
      prev = std::move(grown);
    }
  }
  for (int y = 0; y < stain.height(); ++y) {
    for (int x = 0; x < stain.width(); ++x) {
      const int d = ring[static_cast<std::size_t>(y) * stain.width() + x];
      if (d > 0) {
        const double base = halo == 1 ? kHaloMaxV : kHaloMaxV - (kHaloMaxV - kHaloMinV) * (d - 1) / double(halo - 1);
        // Three draws, as for a background pixel, so the noise stream past
        // the halo matches the halo-free frame.
        double n = 0.0;
        if (sigma > 0) {
          n = sigma * noise.normal();
          noise.normal();
          noise.normal();
        }
        const double v = std::clamp(base + n, double(kHaloMinV), double(kHaloMaxV));
        img.set(x, y, hsv_to_rgb({static_cast<std::uint8_t>(hue), static_cast<std::uint8_t>(sat), clamp_byte(v)}));
      } else if (stain.at(x, y)) {
        const double v = std::clamp(val + (sigma > 0 ? sigma * noise.normal() : 0.0), double(kStainMinV), 255.0);
        img.set(x, y, hsv_to_rgb({static_cast<std::uint8_t>(hue), static_cast<std::uint8_t>(sat), clamp_byte(v)}));
      } else {
        const double n0 = sigma > 0 ? sigma * noise.normal() : 0.0;
        const double n1 = sigma > 0 ? sigma * noise.normal() : 0.0;
        const double n2 = sigma > 0 ? sigma * noise.normal() : 0.0;
        img.set(x, y, {clamp_byte(bg + n0), clamp_byte(bg + n1), clamp_byte(bg + 2 + n2)});
      }
    }
  }
  return img;
}

// Stain over the part of the cluster on the far side of a line with normal
// `phi`, extended 4 px beyond the cluster. The extension guarantees that a
// radius-1 opening keeps every cluster pixel of the region, so the measured
// overlap equals the constructed one. Returns the stain and the count of
// covered cluster pixels, which is the smallest achievable count >= target.
std::pair<BinaryMask, std::size_t> half_plane_stain(const BinaryMask& cluster, double phi, std::size_t target) {
  const double nx = std::cos(phi);
  const double ny = std::sin(phi);
  std::vector<double> proj;
  for (int y = 0; y < cluster.height(); ++y)
    for (int x = 0; x < cluster.width(); ++x)
      if (cluster.at(x, y)) proj.push_back(nx * (x + 0.5) + ny * (y + 0.5));
  std::sort(proj.begin(), proj.end(), std::greater<>());
  target = std::clamp<std::size_t>(target, 1, proj.size());
  const double cut = proj[target - 1];
  const BinaryMask grown = dilate(cluster, 4);
  BinaryMask stain(cluster.width(), cluster.height());
  std::size_t covered = 0;
  for (int y = 0; y < cluster.height(); ++y) {
    for (int x = 0; x < cluster.width(); ++x) {
      if (grown.at(x, y) && nx * (x + 0.5) + ny * (y + 0.5) >= cut) {
        stain.set(x, y);
        covered += cluster.at(x, y) ? 1 : 0;
      }
    }
  }
  return {stain, covered};
}

double fraction(std::size_t part, std::size_t whole) {
  return static_cast<double>(part) / static_cast<double>(whole);
}

// Partial stain whose realized fraction stays on the requested side of the
// boundary.
std::pair<BinaryMask, double> partial_stain(Rng& rng, const BinaryMask& cluster, double f, bool stained) {
  const std::size_t area = mask_area(cluster);
  const double phi = rng.uniform(0.0, 2 * M_PI);
  auto target = static_cast<std::size_t>(std::ceil(f * static_cast<double>(area)));
  for (;;) {
    auto [stain, covered] = half_plane_stain(cluster, phi, target);
    const double realized = fraction(covered, area);
    if (stained ? realized >= kCoverBoundary : realized < kCoverBoundary) return {stain, realized};
    if (stained) {
      ++target;
    } else {
      if (target <= 1) invalid("cluster too small for an unstained partial cover");
      --target;
    }
  }
}

void validate(const SceneSpec& s) {
  if (s.width < 64 || s.height < 64) invalid(fmt::format("canvas {}x{} is smaller than 64x64", s.width, s.height));
  if (!(s.noise_sigma >= 0.0)) invalid("noise_sigma must be non-negative");
  if (s.halo_width < 0 || s.halo_width > 32) invalid("halo_width must be in [0, 32]");
  switch (s.kind) {
    case SceneKind::Cluster:
      if (s.n_cells < 2) invalid("a cluster needs at least 2 cells");
      if (!s.phenotype || *s.phenotype == Phenotype::Indeterminate) invalid("a cluster scene needs a phenotype");
      break;
    case SceneKind::SingleCell:
      if (s.n_cells != 1) invalid("a single-cell scene has exactly 1 cell");
      break;
    case SceneKind::MultiSeparated:
      if (s.n_cells < 2) invalid("a multi-separated scene needs at least 2 cells");
      break;
    case SceneKind::Blank:
      if (s.n_cells != 0) invalid("a blank scene has no cells");
      break;
  }
  if (s.kind != SceneKind::Cluster) {
    if (s.phenotype) invalid("only cluster scenes carry a phenotype");
    if (s.artifact != ArtifactMode::None) invalid("artifacts are only injected into cluster scenes");
    return;
  }
  if (s.artifact == ArtifactMode::StainOutside && s.phenotype == Phenotype::WBC_PLT) {
    invalid("WBC+PLT has no unstained channel to place an outside stain in");
  }
  if (s.artifact == ArtifactMode::PartialCover && s.phenotype == Phenotype::RBC) {
    invalid("an RBC cluster cannot carry a partial cover");
  }
  if (s.cover_fraction) {
    if (s.artifact != ArtifactMode::PartialCover) invalid("cover_fraction only applies to partial_cover");
    const double f = *s.cover_fraction;
    if (!(f > 0.0 && f < 1.0)) invalid("cover_fraction must lie in (0,1)");
    if ((f >= kCoverBoundary) != (s.phenotype == Phenotype::WBC_PLT)) {
      invalid(fmt::format("cover_fraction {} contradicts phenotype {}", f, to_label_string(*s.phenotype)));
    }
  }
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  validate(spec);
  const int w = spec.width;
  const int h = spec.height;
  Rng geo(spec.seed);
  Rng noise(spec.seed ^ 0x9e3779b97f4a7c15ULL);

  Scene scene;
  switch (spec.kind) {
    case SceneKind::Cluster: scene.cells = place_cluster(geo, spec.n_cells, w, h); break;
    case SceneKind::SingleCell:
    case SceneKind::MultiSeparated: scene.cells = place_separated(geo, spec.n_cells, w, h); break;
    case SceneKind::Blank: break;
  }
  scene.brightfield = render_brightfield(geo, noise, scene.cells, w, h, spec.noise_sigma);
  scene.cluster_mask = BinaryMask(w, h);
  scene.stain_cd61 = BinaryMask(w, h);
  scene.stain_cd45 = BinaryMask(w, h);

  MultiChannelRecord& rec = scene.record;
  rec.cluster_label = spec.kind == SceneKind::Cluster ? ClusterLabel::Cluster : ClusterLabel::NonCluster;

  if (spec.kind == SceneKind::Cluster) {
    const BinaryMask& c = scene.cluster_mask = union_of(scene.cells, w, h);
    const Phenotype p = *spec.phenotype;
    rec.phenotype_label = p;
    auto full = [&]() { return dilate(c, static_cast<int>(geo.uniform_int(1, 3))); };
    switch (p) {
      case Phenotype::PLT: scene.stain_cd61 = full(); break;
      case Phenotype::WBC: scene.stain_cd45 = full(); break;
      case Phenotype::WBC_PLT:
        if (spec.artifact != ArtifactMode::PartialCover) {
          const std::size_t area = mask_area(c);
          const double phi = geo.uniform(0.0, 2 * M_PI);
          const auto t61 = static_cast<std::size_t>(std::ceil(geo.uniform(0.35, 0.75) * static_cast<double>(area)));
          const auto t45 = static_cast<std::size_t>(std::ceil(geo.uniform(0.35, 0.75) * static_cast<double>(area)));
          scene.stain_cd61 = half_plane_stain(c, phi, t61).first;
          scene.stain_cd45 = half_plane_stain(c, phi + M_PI, t45).first;
        }
        break;
      default: break;
    }

    if (spec.artifact == ArtifactMode::PartialCover) {
      Channel partial_ch = Channel::CD45;
      if (p == Phenotype::WBC) partial_ch = Channel::CD61;
      if (p == Phenotype::WBC_PLT) partial_ch = geo.bernoulli(0.5) ? Channel::CD61 : Channel::CD45;
      const bool stained = p == Phenotype::WBC_PLT;
      const double f = spec.cover_fraction ? *spec.cover_fraction
                       : stained          ? geo.uniform(0.15, 0.20)
                                          : geo.uniform(0.10, kCoverBoundary);
      BinaryMask stain = partial_stain(geo, c, f, stained).first;
      if (p == Phenotype::WBC_PLT) {
        (partial_ch == Channel::CD61 ? scene.stain_cd45 : scene.stain_cd61) = full();
      }
      (partial_ch == Channel::CD61 ? scene.stain_cd61 : scene.stain_cd45) = std::move(stain);
      rec.artifacts.push_back(fmt::format("partial_cover:{}", to_string(partial_ch)));
    }

    if (spec.artifact == ArtifactMode::StainOutside) {
      Channel ch = p == Phenotype::PLT ? Channel::CD45 : Channel::CD61;
      if (p == Phenotype::RBC) ch = geo.bernoulli(0.5) ? Channel::CD61 : Channel::CD45;
      const BinaryMask keep_out = dilate(c, kOutsideClearance);
      BinaryMask blob;
      bool placed = false;
      for (int tries = 0; tries < 2000 && !placed; ++tries) {
        Ellipse e;
        e.a = geo.uniform(7, 12);
        e.b = geo.uniform(7, e.a);
        e.theta = geo.uniform(0.0, M_PI);
        e.cx = geo.uniform(e.a + 2, w - e.a - 2);
        e.cy = geo.uniform(e.a + 2, h - e.a - 2);
        blob = e.rasterize(w, h);
        placed = mask_area(blob) >= 100 && mask_area(mask_intersection(blob, keep_out)) == 0;
      }
      if (!placed) invalid("no room for an outside stain");
      BinaryMask& target = ch == Channel::CD61 ? scene.stain_cd61 : scene.stain_cd45;
      target = mask_union(target, blob);
      scene.outside_channel = ch;
      rec.artifacts.push_back(fmt::format("stain_outside:{}", to_string(ch)));
      // No valid channel plus an artifact: the record is excluded from scoring.
      rec.excluded = p == Phenotype::RBC;
    }

    const std::size_t area = mask_area(c);
    scene.cover_cd61 = fraction(mask_area(mask_intersection(c, scene.stain_cd61)), area);
    scene.cover_cd45 = fraction(mask_area(mask_intersection(c, scene.stain_cd45)), area);
    for (auto& poly : mask_to_polygons(c)) rec.polygons.push_back({0, std::move(poly)});
  }

  scene.cd61 = render_fluorescence(geo, noise, scene.stain_cd61, Stain::CD61, spec.noise_sigma, spec.halo_width);
  scene.cd45 = render_fluorescence(geo, noise, scene.stain_cd45, Stain::CD45, spec.noise_sigma, spec.halo_width);
  return scene;
}

namespace {

struct Category {
  const char* name;
  SceneKind kind;
  std::optional<Phenotype> phenotype;
};

constexpr Category kCategories[] = {
    {"rbc", SceneKind::Cluster, Phenotype::RBC},
    {"plt", SceneKind::Cluster, Phenotype::PLT},
    {"wbc", SceneKind::Cluster, Phenotype::WBC},
    {"wbcplt", SceneKind::Cluster, Phenotype::WBC_PLT},
    {"single", SceneKind::SingleCell, std::nullopt},
    {"multi", SceneKind::MultiSeparated, std::nullopt},
    {"blank", SceneKind::Blank, std::nullopt},
};

SceneSpec dataset_spec(const Category& cat, const std::string& id, const DatasetOptions& o) {
  SceneSpec s;
  s.width = o.width;
  s.height = o.height;
  s.kind = cat.kind;
  s.phenotype = cat.phenotype;
  s.noise_sigma = o.noise_sigma;
  s.halo_width = o.halo_width;
  s.seed = o.seed + stable_hash(id);
  Rng pick(s.seed ^ 0x5bd1e995ULL);
  switch (cat.kind) {
    case SceneKind::Cluster: s.n_cells = static_cast<int>(pick.uniform_int(2, 4)); break;
    case SceneKind::SingleCell: s.n_cells = 1; break;
    case SceneKind::MultiSeparated: s.n_cells = static_cast<int>(pick.uniform_int(2, 4)); break;
    case SceneKind::Blank: s.n_cells = 0; break;
  }
  if (cat.kind != SceneKind::Cluster) return s;

  const Phenotype p = *cat.phenotype;
  const bool straddle_ok = p != Phenotype::RBC;
  if (straddle_ok && pick.bernoulli(o.straddle_rate)) {
    const double f = pick.uniform(0.10, 0.20);
    s.artifact = ArtifactMode::PartialCover;
    s.cover_fraction = f;
    if (f >= kCoverBoundary) {
      s.phenotype = Phenotype::WBC_PLT;
    } else if (p == Phenotype::WBC_PLT) {
      s.phenotype = pick.bernoulli(0.5) ? Phenotype::PLT : Phenotype::WBC;
    }
    return s;
  }
  if (pick.bernoulli(o.artifact_rate)) {
    if (p == Phenotype::RBC) {
      s.artifact = ArtifactMode::StainOutside;
    } else if (p == Phenotype::WBC_PLT) {
      s.artifact = ArtifactMode::PartialCover;
    } else {
      s.artifact = pick.bernoulli(0.5) ? ArtifactMode::StainOutside : ArtifactMode::PartialCover;
    }
  }
  return s;
}

}  // namespace

DatasetSummary generate_dataset(const fs::path& dir, const DatasetOptions& o) {
  if (o.n_per_category < 1) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("n_per_category must be >= 1, got {}", o.n_per_category));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  const std::size_t ncat = std::size(kCategories);
  const std::size_t total = ncat * static_cast<std::size_t>(o.n_per_category);
  std::vector<MultiChannelRecord> records(total);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const long long n = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      const Category& cat = kCategories[static_cast<std::size_t>(i) / static_cast<std::size_t>(o.n_per_category)];
      const int k = static_cast<int>(i % o.n_per_category);
      const std::string id = fmt::format("{}_{:04d}", cat.name, k);
      Scene scene = generate_scene(dataset_spec(cat, id, o));
      MultiChannelRecord r = std::move(scene.record);
      r.id = id;
      r.brightfield = dir / channel_file_name(id, Channel::Brightfield);
      r.cd61 = dir / channel_file_name(id, Channel::CD61);
      r.cd45 = dir / channel_file_name(id, Channel::CD45);
      write_png(r.brightfield, scene.brightfield);
      write_png(*r.cd61, scene.cd61);
      write_png(*r.cd45, scene.cd45);
      if (r.cluster_label == ClusterLabel::Cluster) {
        r.labels = dir / label_file_name(id);
        save_seg_labels(*r.labels, r.polygons);
      }
      records[static_cast<std::size_t>(i)] = std::move(r);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  DatasetSummary summary;
  summary.manifest = dir / "manifest.jsonl";
  summary.records = records.size();
  write_manifest(summary.manifest, records);

  std::string digests = file_digest(summary.manifest);
  for (const auto& r : records) {
    digests += file_digest(r.brightfield) + file_digest(*r.cd61) + file_digest(*r.cd45);
    if (r.labels) digests += file_digest(*r.labels);
  }
  summary.digest = fmt::format("{:016x}", stable_hash(digests));
  return summary;
}

}  // namespace ccc
