#include "ccc/phenotype/phenotype.hpp"

#include <exception>
#include <mutex>

#include <fmt/format.h>

#include "ccc/dataset/labels.hpp"
#include "ccc/error.hpp"
#include "ccc/imaging/image_io.hpp"
#include "ccc/imaging/mask_ops.hpp"
#include "ccc/imaging/morphology.hpp"

namespace ccc {

std::string_view to_string(Stain s) { return s == Stain::CD61 ? "cd61" : "cd45"; }

std::string_view to_string(ChannelState s) {
  switch (s) {
    case ChannelState::Absent: return "absent";
    case ChannelState::Valid: return "valid";
    case ChannelState::Artifact: return "artifact";
  }
  return "absent";
}

HsvRange stain_range(Stain s, int v_x) {
  if (s == Stain::CD61) return {{35, 100, v_x}, {85, 255, 255}};
  return {{20, 100, v_x}, {40, 255, 255}};
}

BinaryMask extract_stain_region(const ImageRGB& channel, Stain s, int v_x) {
  if (v_x < 0 || v_x > 255) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("v_x must lie in [0,255], got {}", v_x));
  }
  return morphological_open(threshold_hsv(channel, stain_range(s, v_x)), 1);
}

double overlap_percent(const BinaryMask& cluster, const BinaryMask& stain) {
  require_same_shape(cluster, stain);
  const std::size_t area = mask_area(cluster);
  if (area == 0) throw Error(ErrorCode::EmptyClusterMask, "cluster mask is empty");
  return static_cast<double>(mask_area(mask_intersection(cluster, stain))) / static_cast<double>(area);
}

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("tau must lie in (0,1), got {}", tau));
  }
}

ChannelState classify(std::size_t stain_area, double overlap, double tau, std::size_t min_stain_area) {
  if (stain_area < min_stain_area) return ChannelState::Absent;
  return overlap >= tau ? ChannelState::Valid : ChannelState::Artifact;
}

}  // namespace

ChannelAssessment assess_channel(const BinaryMask& cluster, const BinaryMask& stain_mask, Stain s,
                                 double tau, std::size_t min_stain_area) {
  check_tau(tau);
  ChannelAssessment a;
  a.stain = s;
  a.overlap_percent = overlap_percent(cluster, stain_mask);
  a.cluster_area = mask_area(cluster);
  a.stain_area = mask_area(stain_mask);
  a.overlap_area = mask_area(mask_intersection(cluster, stain_mask));
  a.state = classify(a.stain_area, a.overlap_percent, tau, min_stain_area);
  return a;
}

ChannelAssessment missing_channel(Stain s, std::size_t cluster_area) {
  ChannelAssessment a;
  a.stain = s;
  a.cluster_area = cluster_area;
  a.state = ChannelState::Absent;
  a.missing = true;
  return a;
}

Phenotype decide(ChannelState cd61, ChannelState cd45) noexcept {
  const bool plt = cd61 == ChannelState::Valid;
  const bool wbc = cd45 == ChannelState::Valid;
  if (plt && wbc) return Phenotype::WBC_PLT;
  if (plt) return Phenotype::PLT;
  if (wbc) return Phenotype::WBC;
  if (cd61 == ChannelState::Absent && cd45 == ChannelState::Absent) return Phenotype::RBC;
  return Phenotype::Indeterminate;
}

PhenotypeDecision decide_phenotype(const ChannelAssessment& cd61, const ChannelAssessment& cd45, double tau,
                                   int v_x) {
  return {decide(cd61.state, cd45.state), cd61, cd45, tau, v_x};
}

PhenotypeDecision phenotype_record(const BinaryMask& cluster, const ImageRGB* cd61, const ImageRGB* cd45,
                                   const PhenotypeParams& params) {
  check_tau(params.tau);
  const std::size_t area = mask_area(cluster);
  if (area == 0) throw Error(ErrorCode::EmptyClusterMask, "cluster mask is empty");
  auto assess = [&](const ImageRGB* img, Stain s) {
    if (!img) return missing_channel(s, area);
    return assess_channel(cluster, extract_stain_region(*img, s, params.v_x), s, params.tau, params.min_stain_area);
  };
  return decide_phenotype(assess(cd61, Stain::CD61), assess(cd45, Stain::CD45), params.tau, params.v_x);
}

nlohmann::json to_json(const ChannelAssessment& a) {
  return {{"stain", std::string(to_string(a.stain))},
          {"state", std::string(to_string(a.state))},
          {"stain_area", a.stain_area},
          {"overlap_area", a.overlap_area},
          {"cluster_area", a.cluster_area},
          {"overlap_percent", a.overlap_percent},
          {"missing", a.missing}};
}

nlohmann::json to_json(const std::string& record_id, const PhenotypeDecision& d) {
  return {{"id", record_id},
          {"phenotype", std::string(to_decision_string(d.phenotype))},
          {"cd61", to_json(d.cd61)},
          {"cd45", to_json(d.cd45)},
          {"tau", d.tau},
          {"v_x", d.v_x}};
}

std::optional<Phenotype> expected_phenotype(const MultiChannelRecord& r) {
  if (!r.phenotype_label) return std::nullopt;
  return r.excluded ? Phenotype::Indeterminate : *r.phenotype_label;
}

PhenotypeInput load_phenotype_input(const MultiChannelRecord& r, std::vector<std::string>* warnings) {
  PhenotypeInput in;
  in.id = r.id;
  in.expected = expected_phenotype(r);
  const ImageRGB bf = read_image(r.brightfield);
  in.cluster = union_mask(r.polygons, bf.width(), bf.height());
  auto load = [&](const std::optional<std::filesystem::path>& p, Stain s) -> std::optional<ImageRGB> {
    if (!p) {
      if (warnings) warnings->push_back(fmt::format("{}: no {} image, channel treated as absent", r.id, to_string(s)));
      return std::nullopt;
    }
    try {
      ImageRGB img = read_image(*p);
      if (img.width() != bf.width() || img.height() != bf.height()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{}: {} image is {}x{}, brightfield is {}x{}", r.id, to_string(s), img.width(),
                                img.height(), bf.width(), bf.height()));
      }
      return img;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Io) throw;
      if (warnings) warnings->push_back(fmt::format("{}: {} image unreadable ({}), channel treated as absent", r.id,
                                                    to_string(s), e.what()));
      return std::nullopt;
    }
  };
  in.cd61 = load(r.cd61, Stain::CD61);
  in.cd45 = load(r.cd45, Stain::CD45);
  return in;
}

SweepResult sweep_thresholds(std::span<const PhenotypeInput> inputs, std::span<const int> v_values,
                             std::span<const double> taus, std::size_t min_stain_area) {
  for (double t : taus) check_tau(t);
  for (int v : v_values) {
    if (v < 0 || v > 255) throw Error(ErrorCode::InvalidArgument, fmt::format("v_x {} outside [0,255]", v));
  }
  std::vector<std::size_t> scored;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (inputs[i].expected) scored.push_back(i);
  if (scored.empty()) throw Error(ErrorCode::EmptyDataset, "no records with phenotype ground truth to sweep");

  const std::size_t nv = v_values.size();
  const std::size_t nt = taus.size();
  // Per record: correct[t * nv + v], area sums per v for both channels.
  struct Partial {
    std::vector<int> correct;
    std::vector<std::size_t> area61, area45;
  };
  std::vector<Partial> partial(scored.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const long long n = static_cast<long long>(scored.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      const PhenotypeInput& in = inputs[scored[static_cast<std::size_t>(i)]];
      const std::size_t cluster_area = mask_area(in.cluster);
      if (cluster_area == 0) throw Error(ErrorCode::EmptyClusterMask, "record '" + in.id + "' has an empty cluster mask");
      Partial p;
      p.correct.assign(nt * nv, 0);
      p.area61.assign(nv, 0);
      p.area45.assign(nv, 0);
      for (std::size_t v = 0; v < nv; ++v) {
        std::size_t stain[2] = {0, 0};
        std::size_t overlap[2] = {0, 0};
        const std::optional<ImageRGB>* chans[2] = {&in.cd61, &in.cd45};
        for (int c = 0; c < 2; ++c) {
          if (!*chans[c]) continue;
          const BinaryMask m = extract_stain_region(**chans[c], c == 0 ? Stain::CD61 : Stain::CD45, v_values[v]);
          require_same_shape(in.cluster, m);
          stain[c] = mask_area(m);
          overlap[c] = mask_area(mask_intersection(in.cluster, m));
        }
        p.area61[v] = stain[0];
        p.area45[v] = stain[1];
        for (std::size_t t = 0; t < nt; ++t) {
          const auto s61 = classify(stain[0], double(overlap[0]) / double(cluster_area), taus[t], min_stain_area);
          const auto s45 = classify(stain[1], double(overlap[1]) / double(cluster_area), taus[t], min_stain_area);
          p.correct[t * nv + v] = decide(s61, s45) == *in.expected ? 1 : 0;
        }
      }
      partial[static_cast<std::size_t>(i)] = std::move(p);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult r;
  r.v_values.assign(v_values.begin(), v_values.end());
  r.taus.assign(taus.begin(), taus.end());
  r.records = scored.size();
  r.accuracy.assign(nt, std::vector<double>(nv, 0.0));
  std::vector<long long> hits(nt * nv, 0);
  std::vector<std::size_t> sum61(nv, 0), sum45(nv, 0);
  std::size_t with61 = 0, with45 = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto& in = inputs[scored[i]];
    with61 += in.cd61.has_value();
    with45 += in.cd45.has_value();
    for (std::size_t k = 0; k < hits.size(); ++k) hits[k] += partial[i].correct[k];
    for (std::size_t v = 0; v < nv; ++v) {
      sum61[v] += partial[i].area61[v];
      sum45[v] += partial[i].area45[v];
    }
  }
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t v = 0; v < nv; ++v)
      r.accuracy[t][v] = static_cast<double>(hits[t * nv + v]) / static_cast<double>(scored.size());
  for (std::size_t v = 0; v < nv; ++v) {
    r.mean_area_cd61.push_back(with61 ? static_cast<double>(sum61[v]) / static_cast<double>(with61) : 0.0);
    r.mean_area_cd45.push_back(with45 ? static_cast<double>(sum45[v]) / static_cast<double>(with45) : 0.0);
  }
  return r;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "tau";
  for (int v : r.v_values) out += fmt::format(",v{}", v);
  out += '\n';
  for (std::size_t t = 0; t < r.taus.size(); ++t) {
    out += fmt::format("{:.2f}", r.taus[t]);
    for (double a : r.accuracy[t]) out += fmt::format(",{:.6f}", a);
    out += '\n';
  }
  return out;
}

std::string area_csv(const SweepResult& r) {
  std::string out = "v_x,mean_area_cd61,mean_area_cd45\n";
  for (std::size_t v = 0; v < r.v_values.size(); ++v) {
    out += fmt::format("{},{:.3f},{:.3f}\n", r.v_values[v], r.mean_area_cd61[v], r.mean_area_cd45[v]);
  }
  return out;
}

nlohmann::json to_json(const SweepResult& r) {
  return {{"records", r.records},
          {"v_values", r.v_values},
          {"taus", r.taus},
          {"accuracy", r.accuracy},
          {"mean_area_cd61", r.mean_area_cd61},
          {"mean_area_cd45", r.mean_area_cd45}};
}

}  // namespace ccc
