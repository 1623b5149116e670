#pragma once

#include <cstdint>

#include "ccc/imaging/image.hpp"

namespace ccc {

/// Half-degree hue in [0,180), saturation and value in [0,255].
/// Achromatic pixels (s == 0) always carry h == 0.
struct PixelHSV {
  std::uint8_t h{};
  std::uint8_t s{};
  std::uint8_t v{};

  friend bool operator==(const PixelHSV&, const PixelHSV&) = default;
};

struct HsvTriple {
  int h{0};
  int s{0};
  int v{0};

  friend bool operator==(const HsvTriple&, const HsvTriple&) = default;
};

/// Inclusive componentwise HSV bounds. An upper hue of 180 admits every hue.
struct HsvRange {
  HsvTriple lower;
  HsvTriple upper;

  bool contains(PixelHSV p) const noexcept {
    return p.h >= lower.h && p.h <= upper.h && p.s >= lower.s && p.s <= upper.s &&
           p.v >= lower.v && p.v <= upper.v;
  }
  bool well_formed() const noexcept {
    return lower.h <= upper.h && lower.s <= upper.s && lower.v <= upper.v;
  }
};

inline constexpr HsvRange kFullHsvRange{{0, 0, 0}, {180, 255, 255}};

/// Hexcone conversion with integer round-half-up:
///   v = max(r,g,b)
///   s = round(255 * (v - min) / v), 0 when v == 0
///   h = round(hue_degrees / 2) mod 180, 0 when max == min
/// Ties between maximal channels resolve in the order r, g, b.
/// Exact integer arithmetic, so results are bit-identical on every platform.
PixelHSV rgb_to_hsv(Rgb p) noexcept;

/// Inverse conversion (sector formula), rounded half-up to 8 bits.
Rgb hsv_to_rgb(PixelHSV p) noexcept;

/// Bit set iff the pixel's HSV lies inside `range`. Throws InvalidArgument
/// for a range whose lower bound exceeds its upper bound.
BinaryMask threshold_hsv(const ImageRGB& img, const HsvRange& range);

}  // namespace ccc
