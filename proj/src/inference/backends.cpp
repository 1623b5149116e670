#include "ccc/inference/backends.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

#include <fmt/format.h>
#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "ccc/error.hpp"
#include "ccc/imaging/components.hpp"
#include "ccc/imaging/mask_ops.hpp"
#include "ccc/imaging/morphology.hpp"

namespace ccc {

namespace {

void require_model_input(const ImageRGB& img) {
  if (img.width() != kModelInputSize || img.height() != kModelInputSize) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("model input must be {0}x{0}, got {1}x{2}", kModelInputSize,
                                                      img.width(), img.height()));
  }
}

}  // namespace

StubClassifier::StubClassifier(ClusterLabel label, double score) : fixed_{label, score} {
  if (label == ClusterLabel::Unknown) throw Error(ErrorCode::InvalidArgument, "stub label must be cluster or non-cluster");
  if (!(score >= 0.0 && score <= 1.0)) throw Error(ErrorCode::InvalidArgument, "stub score must lie in [0,1]");
}

ClusterPrediction StubClassifier::classify(const ImageRGB& img) const {
  require_model_input(img);
  return fixed_;
}

EchoSegmenter::EchoSegmenter(std::vector<BinaryMask> masks) : masks_(std::move(masks)) {}

std::vector<InstancePrediction> EchoSegmenter::segment(const ImageRGB& img) const {
  std::vector<InstancePrediction> out;
  for (const auto& m : masks_) {
    if (m.width() != img.width() || m.height() != img.height()) {
      throw Error(ErrorCode::DimensionMismatch, "echoed mask does not match the image size");
    }
    out.push_back(make_instance(m, 1.0));
  }
  return out;
}

std::vector<std::uint8_t> luma(const ImageRGB& img) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
  std::size_t i = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb p = img.at(x, y);
      out[i++] = static_cast<std::uint8_t>((299 * p.r + 587 * p.g + 114 * p.b + 500) / 1000);
    }
  }
  return out;
}

OtsuResult otsu(std::span<const std::uint8_t> values) {
  std::array<std::uint64_t, 256> hist{};
  for (auto v : values) ++hist[v];
  const double total = static_cast<double>(values.size());
  double sum_all = 0;
  for (int i = 0; i < 256; ++i) sum_all += static_cast<double>(i) * static_cast<double>(hist[i]);

  OtsuResult best;
  if (values.empty()) return best;
  double best_var = -1.0;
  double w0 = 0, sum0 = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += static_cast<double>(hist[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(hist[t]);
    if (hist[t] == 0 && w0 > 0 && w0 < total) continue;
    const double w1 = total - w0;
    if (w0 == 0) continue;
    const double m0 = sum0 / w0;
    const double m1 = w1 > 0 ? (sum_all - sum0) / w1 : m0;
    const double var = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (var > best_var) {
      best_var = var;
      best = {t, m0, m1};
    }
  }
  return best;
}

BinaryMask classical_foreground(const ImageRGB& img, const ClassicalParams& p) {
  BinaryMask fg(img.width(), img.height());
  if (img.width() == 0 || img.height() == 0) return fg;
  const auto l = luma(img);
  const OtsuResult o = otsu(l);
  if (o.mean_high - o.mean_low < p.min_contrast) return fg;
  auto bits = fg.bits();
  for (std::size_t i = 0; i < l.size(); ++i) bits[i] = l[i] <= o.threshold ? 1 : 0;
  fg = morphological_open(fg, p.open_radius);
  const ComponentLabels cc = connected_components(fg);
  BinaryMask kept(img.width(), img.height());
  auto kb = kept.bits();
  for (std::size_t i = 0; i < cc.labels.size(); ++i) {
    const auto id = cc.labels[i];
    if (id > 0 && cc.components[static_cast<std::size_t>(id - 1)].area >= p.min_area) kb[i] = 1;
  }
  return kept;
}

std::vector<InstancePrediction> classical_fallback_segment(const ImageRGB& img, const ClassicalParams& p) {
  const ComponentLabels cc = connected_components(classical_foreground(img, p));
  std::size_t largest = 0;
  for (const auto& c : cc.components) largest = std::max(largest, c.area);
  std::vector<InstancePrediction> out;
  for (const auto& c : cc.components) {
    out.push_back(make_instance(cc.mask_of(c.id), static_cast<double>(c.area) / static_cast<double>(largest)));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const InstancePrediction& a, const InstancePrediction& b) { return a.confidence > b.confidence; });
  return out;
}

std::vector<InstancePrediction> ClassicalSegmenter::segment(const ImageRGB& img) const {
  return classical_fallback_segment(img, p_);
}

int ClassicalClassifier::max_cores(const ImageRGB& img) const {
  const BinaryMask fg = classical_foreground(img, p_);
  const ComponentLabels parts = connected_components(fg);
  const ComponentLabels cores = connected_components(erode(fg, p_.neck_radius));
  std::vector<int> per_part(parts.components.size(), 0);
  std::vector<bool> seen(cores.components.size(), false);
  for (std::size_t i = 0; i < cores.labels.size(); ++i) {
    const auto c = cores.labels[i];
    if (c == 0 || seen[static_cast<std::size_t>(c - 1)]) continue;
    seen[static_cast<std::size_t>(c - 1)] = true;
    if (cores.components[static_cast<std::size_t>(c - 1)].area < p_.min_core_area) continue;
    // Erosion only shrinks, so a core lies inside exactly one part.
    ++per_part[static_cast<std::size_t>(parts.labels[i] - 1)];
  }
  return per_part.empty() ? 0 : *std::max_element(per_part.begin(), per_part.end());
}

ClusterPrediction ClassicalClassifier::classify(const ImageRGB& img) const {
  require_model_input(img);
  return max_cores(img) >= 2 ? ClusterPrediction{ClusterLabel::Cluster, 0.9}
                             : ClusterPrediction{ClusterLabel::NonCluster, 0.9};
}

std::vector<float> to_input_tensor(const ImageRGB& img) {
  const std::size_t plane = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<float> t(3 * plane);
  std::size_t i = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x, ++i) {
      const Rgb p = img.at(x, y);
      t[i] = p.r / 255.0f;
      t[plane + i] = p.g / 255.0f;
      t[2 * plane + i] = p.b / 255.0f;
    }
  }
  return t;
}

namespace {

cv::dnn::Net load_net(const std::filesystem::path& model) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(model, ec)) {
    throw Error(ErrorCode::BackendUnavailable, "model file not found: " + model.string());
  }
  try {
    cv::dnn::Net net = cv::dnn::readNetFromONNX(model.string());
    if (net.empty()) throw Error(ErrorCode::BackendUnavailable, "model has no layers: " + model.string());
    net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
    return net;
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::BackendUnavailable, "cannot load model " + model.string() + ": " + e.msg);
  }
}

cv::Mat input_blob(const ImageRGB& img) {
  std::vector<float> t = to_input_tensor(img);
  const int shape[] = {1, 3, img.height(), img.width()};
  cv::Mat blob(4, shape, CV_32F);
  std::copy(t.begin(), t.end(), blob.ptr<float>());
  return blob;
}

std::string shape_of(const cv::Mat& m) {
  std::string s;
  for (int i = 0; i < m.dims; ++i) s += (i ? "x" : "") + std::to_string(m.size[i]);
  return s;
}

}  // namespace

struct OnnxClassifier::Impl {
  cv::dnn::Net net;
  std::mutex mutex;
};

OnnxClassifier::OnnxClassifier(const std::filesystem::path& model) : impl_(std::make_unique<Impl>()) {
  impl_->net = load_net(model);
}

OnnxClassifier::~OnnxClassifier() = default;

ClusterPrediction OnnxClassifier::classify(const ImageRGB& img) const {
  require_model_input(img);
  cv::Mat out;
  {
    std::lock_guard lock(impl_->mutex);
    try {
      impl_->net.setInput(input_blob(img));
      out = impl_->net.forward().clone();
    } catch (const cv::Exception& e) {
      throw Error(ErrorCode::BackendUnavailable, "inference failed: " + e.msg);
    }
  }
  if (out.total() != 2) throw Error(ErrorCode::ShapeMismatch, "classifier output must have 2 values, got " + shape_of(out));
  const float* p = out.ptr<float>();
  const double cluster = std::clamp(static_cast<double>(p[1]), 0.0, 1.0);
  return cluster >= 0.5 ? ClusterPrediction{ClusterLabel::Cluster, cluster}
                        : ClusterPrediction{ClusterLabel::NonCluster, 1.0 - cluster};
}

struct OnnxSegmenter::Impl {
  cv::dnn::Net net;
  std::mutex mutex;
};

OnnxSegmenter::OnnxSegmenter(const std::filesystem::path& model, double score_threshold, double mask_threshold)
    : impl_(std::make_unique<Impl>()), score_threshold_(score_threshold), mask_threshold_(mask_threshold) {
  impl_->net = load_net(model);
}

OnnxSegmenter::~OnnxSegmenter() = default;

std::vector<InstancePrediction> OnnxSegmenter::segment(const ImageRGB& img) const {
  require_model_input(img);
  std::vector<cv::Mat> outs;
  {
    std::lock_guard lock(impl_->mutex);
    try {
      impl_->net.setInput(input_blob(img));
      impl_->net.forward(outs, std::vector<cv::String>{"scores", "masks"});
    } catch (const cv::Exception& e) {
      throw Error(ErrorCode::BackendUnavailable, "inference failed: " + e.msg);
    }
    for (auto& o : outs) o = o.clone();
  }
  const cv::Mat& scores = outs.at(0);
  const cv::Mat& masks = outs.at(1);
  const std::size_t n = scores.total();
  const std::size_t plane = static_cast<std::size_t>(kModelInputSize) * kModelInputSize;
  if (masks.total() != n * plane) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("masks output {} does not match {} scores", shape_of(masks), n));
  }
  std::vector<InstancePrediction> out;
  const float* s = scores.ptr<float>();
  const float* m = masks.ptr<float>();
  for (std::size_t k = 0; k < n; ++k) {
    const double conf = std::clamp(static_cast<double>(s[k]), 0.0, 1.0);
    if (conf < score_threshold_) continue;
    BinaryMask mask(kModelInputSize, kModelInputSize);
    auto bits = mask.bits();
    for (std::size_t i = 0; i < plane; ++i) bits[i] = m[k * plane + i] > mask_threshold_ ? 1 : 0;
    if (mask_area(mask) == 0) continue;
    out.push_back(make_instance(std::move(mask), conf));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const InstancePrediction& a, const InstancePrediction& b) { return a.confidence > b.confidence; });
  return out;
}

std::unique_ptr<Classifier> make_classifier(const std::string& spec) {
  if (spec == "classical") return std::make_unique<ClassicalClassifier>();
  if (spec.rfind("onnx:", 0) == 0) return std::make_unique<OnnxClassifier>(spec.substr(5));
  if (spec.rfind("stub:", 0) == 0) {
    const std::string rest = spec.substr(5);
    const auto colon = rest.find(':');
    const auto label = parse_cluster_label(rest.substr(0, colon));
    double score = 1.0;
    if (colon != std::string::npos) {
      try {
        std::size_t used = 0;
        score = std::stod(rest.substr(colon + 1), &used);
        if (used != rest.size() - colon - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad stub score in '" + spec + "'");
      }
    }
    if (!label) throw Error(ErrorCode::InvalidArgument, "bad stub label in '" + spec + "'");
    return std::make_unique<StubClassifier>(*label, score);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown classifier backend '" + spec + "'");
}

std::unique_ptr<Segmenter> make_segmenter(const std::string& spec) {
  if (spec == "classical") return std::make_unique<ClassicalSegmenter>();
  if (spec.rfind("onnx:", 0) == 0) return std::make_unique<OnnxSegmenter>(spec.substr(5));
  throw Error(ErrorCode::InvalidArgument, "unknown segmenter backend '" + spec + "'");
}

}  // namespace ccc
