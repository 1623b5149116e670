#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccc/imaging/image.hpp"

namespace ccc {

/// Side length every classifier and segmenter input is standardized to.
inline constexpr int kStandardSize = 224;

/// Centres the image on an S x S canvas, S = max(w, h). When the padding
/// total is odd the extra row/column goes to the bottom/right.
ImageRGB pad_to_square(const ImageRGB& img, Rgb fill = kPadGray);

/// Bilinear resampling with half-pixel-centre alignment and clamped borders.
/// Throws InvalidArgument for non-positive target dimensions.
ImageRGB resize_bilinear(const ImageRGB& img, int width, int height);

/// pad_to_square followed by a resize to kStandardSize.
ImageRGB standardize(const ImageRGB& img, Rgb fill = kPadGray);

/// Bounds from which each augmentation draw is made. Setting a bound to its
/// neutral value (scale 1, rotation 0, flips off, jitter 0, sigma 0) turns
/// the corresponding step into an exact no-op.
struct AugmentParams {
  double crop_scale_min{0.8};
  double crop_scale_max{1.0};
  /// Angle drawn uniformly from [0, rotation_max_deg).
  double rotation_max_deg{360.0};
  bool hflip{true};
  bool vflip{true};
  /// Multiplicative factors drawn from [1 - x, 1 + x].
  double brightness{0.2};
  double contrast{0.2};
  double saturation{0.2};
  /// Hue shift in half-degrees drawn from [-hue, hue].
  int hue{10};
  /// Gaussian sigma drawn from [0, blur_sigma].
  double blur_sigma{1.0};
  std::uint64_t seed{0};
};

/// The concrete values one seed produces.
struct AugmentDraw {
  double crop_scale{1.0};
  double crop_x{0.0};  ///< Left edge as a fraction of the free horizontal slack.
  double crop_y{0.0};
  double rotation_deg{0.0};
  bool hflip{false};
  bool vflip{false};
  double brightness{1.0};
  double contrast{1.0};
  double saturation{1.0};
  int hue_shift{0};
  double blur_sigma{0.0};
};

/// Throws InvalidArgument for a crop interval outside (0,1] or negative bounds.
AugmentDraw draw_augment(const AugmentParams& params);

/// crop -> rotate -> flip -> jitter -> blur. Output has the input's size.
ImageRGB apply_augment(const ImageRGB& img, const AugmentDraw& draw);
ImageRGB augment(const ImageRGB& img, const AugmentParams& params);

/// Separable, normalized Gaussian with reflect-101 borders; sigma <= 0 is
/// the identity.
ImageRGB gaussian_blur(const ImageRGB& img, double sigma);

struct NamedImage {
  std::string id;
  ImageRGB image;
};

struct AugmentedImage {
  std::string source_id;
  int variant{0};
  std::uint64_t seed{0};
  ImageRGB image;
};

inline constexpr int kExpansionFactor = 5;

/// Seed used for variant k of image `id`.
std::uint64_t variant_seed(std::uint64_t base_seed, const std::string& id, int k);

/// Five augmented variants per input, in input order then variant order.
/// `params.seed` is ignored; each variant uses variant_seed().
std::vector<AugmentedImage> expand_fivefold(std::span<const NamedImage> imgs,
                                            std::uint64_t base_seed,
                                            const AugmentParams& params = {});

}  // namespace ccc
