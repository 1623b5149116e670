#include "ccc/imaging/hsv.hpp"

#include <algorithm>
#include <cmath>

#include "ccc/error.hpp"
#include "ccc/kernels/kernels.hpp"

namespace ccc {

PixelHSV rgb_to_hsv(Rgb p) noexcept {
  const int r = p.r;
  const int g = p.g;
  const int b = p.b;
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  if (mx == 0) return {0, 0, 0};

  const int delta = mx - mn;
  const int s = (2 * 255 * delta + mx) / (2 * mx);
  if (delta == 0) return {0, 0, static_cast<std::uint8_t>(mx)};

  // Hue in half-degrees scaled by delta; always non-negative.
  int num = 0;
  if (mx == r) {
    num = 30 * (g - b) + (g < b ? 180 * delta : 0);
  } else if (mx == g) {
    num = 60 * delta + 30 * (b - r);
  } else {
    num = 120 * delta + 30 * (r - g);
  }
  int h = (2 * num + delta) / (2 * delta);
  if (h >= 180) h -= 180;
  return {static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(s),
          static_cast<std::uint8_t>(mx)};
}

Rgb hsv_to_rgb(PixelHSV p) noexcept {
  const double v = p.v;
  const double c = v * p.s / 255.0;
  const double hp = (2.0 * p.h) / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  const double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  auto q = [m](double u) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(u + m + 0.5), 0.0, 255.0));
  };
  return {q(r), q(g), q(b)};
}

BinaryMask threshold_hsv(const ImageRGB& img, const HsvRange& range) {
  if (!range.well_formed()) {
    throw Error(ErrorCode::InvalidArgument, "HSV range lower bound exceeds upper bound");
  }
  return kernels::parallel::threshold_hsv(img, range);
}

}  // namespace ccc
