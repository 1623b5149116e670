#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ccc/imaging/image.hpp"
#include "ccc/inference/prediction.hpp"

namespace ccc {

/// Side length every classifier input must have.
inline constexpr int kModelInputSize = 224;

/// Implementations are immutable after construction; concurrent calls are
/// allowed.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  /// Throws ShapeMismatch unless img is kModelInputSize square.
  virtual ClusterPrediction classify(const ImageRGB& img) const = 0;
};

/// Instances come back sorted by descending confidence, each box tight
/// around its mask, each mask the size of the input.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::string name() const = 0;
  /// True when inputs must be kModelInputSize square.
  virtual bool fixed_input() const { return false; }
  virtual std::vector<InstancePrediction> segment(const ImageRGB& img) const = 0;
};

/// Returns the same prediction for every well-shaped input.
class StubClassifier final : public Classifier {
 public:
  StubClassifier(ClusterLabel label, double score);
  std::string name() const override { return "stub"; }
  ClusterPrediction classify(const ImageRGB& img) const override;

 private:
  ClusterPrediction fixed_;
};

/// Returns the masks it was built with, confidence 1 each.
class EchoSegmenter final : public Segmenter {
 public:
  explicit EchoSegmenter(std::vector<BinaryMask> masks);
  std::string name() const override { return "echo"; }
  std::vector<InstancePrediction> segment(const ImageRGB& img) const override;

 private:
  std::vector<BinaryMask> masks_;
};

struct ClassicalParams {
  std::size_t min_area{25};
  /// Otsu classes whose mean luma differ by less than this are treated as
  /// one background population.
  double min_contrast{40.0};
  int open_radius{1};
  /// Erosion radius that cuts the neck between touching cells.
  int neck_radius{8};
  /// Eroded cores smaller than this are ignored.
  std::size_t min_core_area{4};
};

/// Rounded 0.299/0.587/0.114 luma.
std::vector<std::uint8_t> luma(const ImageRGB& img);

/// Threshold t maximizing between-class variance of {<= t} vs {> t}, plus
/// the mean of each class. Uniform input gives t = value, equal means.
struct OtsuResult {
  int threshold{0};
  double mean_low{0.0};
  double mean_high{0.0};
};
OtsuResult otsu(std::span<const std::uint8_t> values);

/// Dark-on-light foreground: luma <= Otsu threshold, opened, components with
/// area >= min_area. Empty when the contrast guard trips.
BinaryMask classical_foreground(const ImageRGB& img, const ClassicalParams& p = {});

/// One instance per foreground component; confidence = area / largest area.
std::vector<InstancePrediction> classical_fallback_segment(const ImageRGB& img, const ClassicalParams& p = {});

class ClassicalSegmenter final : public Segmenter {
 public:
  explicit ClassicalSegmenter(ClassicalParams p = {}) : p_(p) {}
  std::string name() const override { return "classical"; }
  std::vector<InstancePrediction> segment(const ImageRGB& img) const override;

 private:
  ClassicalParams p_;
};

/// Cluster iff some foreground component splits into >= 2 cores of at least
/// min_core_area pixels after erosion by neck_radius. Reports 0.9 for the
/// predicted label.
class ClassicalClassifier final : public Classifier {
 public:
  explicit ClassicalClassifier(ClassicalParams p = {}) : p_(p) {}
  std::string name() const override { return "classical"; }
  ClusterPrediction classify(const ImageRGB& img) const override;
  /// Largest core count over foreground components.
  int max_cores(const ImageRGB& img) const;

 private:
  ClassicalParams p_;
};

/// NCHW float tensor, RGB order, values / 255.
std::vector<float> to_input_tensor(const ImageRGB& img);

/// ONNX model: input 1x3x224x224 in [0,1], output 1x2 softmax
/// probabilities with index 1 = cluster. Throws BackendUnavailable when the
/// file is missing or cannot be loaded.
class OnnxClassifier final : public Classifier {
 public:
  explicit OnnxClassifier(const std::filesystem::path& model);
  ~OnnxClassifier() override;
  std::string name() const override { return "onnx"; }
  ClusterPrediction classify(const ImageRGB& img) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// ONNX model: input 1x3x224x224 in [0,1]; outputs "scores" 1xN and
/// "masks" 1xNx224x224 with per-pixel probabilities. Instances with score
/// >= score_threshold and a non-empty mask (> mask_threshold) are kept.
class OnnxSegmenter final : public Segmenter {
 public:
  explicit OnnxSegmenter(const std::filesystem::path& model, double score_threshold = 0.5,
                         double mask_threshold = 0.5);
  ~OnnxSegmenter() override;
  std::string name() const override { return "onnx"; }
  bool fixed_input() const override { return true; }
  std::vector<InstancePrediction> segment(const ImageRGB& img) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double score_threshold_;
  double mask_threshold_;
};

/// "classical", "stub:<label>[:<score>]" or "onnx:<path>". Throws
/// InvalidArgument for anything else.
std::unique_ptr<Classifier> make_classifier(const std::string& spec);
/// "classical" or "onnx:<path>".
std::unique_ptr<Segmenter> make_segmenter(const std::string& spec);

}  // namespace ccc
