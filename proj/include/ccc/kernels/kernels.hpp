#pragma once

// Pixel kernels in two flavours. `serial` holds straightforward per-pixel
// reference implementations that the test suite checks the `parallel`
// (OpenMP) versions against; the public imaging API always calls `parallel`.
// Callers validate shapes before reaching this layer.

#include <cstddef>
#include <span>
#include <vector>

#include "ccc/imaging/hsv.hpp"
#include "ccc/imaging/image.hpp"

namespace ccc::kernels {

/// Half-widths of the digital disc {(dx,dy) : dx^2 + dy^2 <= r(r+1)}, indexed
/// by dy + r. Radius 1 is the full 3x3 square.
std::vector<int> disc_half_widths(int radius);

namespace serial {

BinaryMask threshold_hsv(const ImageRGB& img, const HsvRange& range);
std::size_t count(const BinaryMask& m);
BinaryMask bit_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask bit_or(const BinaryMask& a, const BinaryMask& b);
/// Pixels outside the frame count as clear for both operators.
BinaryMask erode(const BinaryMask& m, int radius);
BinaryMask dilate(const BinaryMask& m, int radius);
/// Vertices in pixel units; a pixel is set iff its centre has an odd number
/// of edge crossings at or left of it (half-open in y).
BinaryMask rasterize(std::span<const Point2> pixel_vertices, int width, int height);
ImageRGB resize_bilinear(const ImageRGB& img, int width, int height);

}  // namespace serial

namespace parallel {

BinaryMask threshold_hsv(const ImageRGB& img, const HsvRange& range);
std::size_t count(const BinaryMask& m);
BinaryMask bit_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask bit_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask erode(const BinaryMask& m, int radius);
BinaryMask dilate(const BinaryMask& m, int radius);
BinaryMask rasterize(std::span<const Point2> pixel_vertices, int width, int height);
ImageRGB resize_bilinear(const ImageRGB& img, int width, int height);

}  // namespace parallel

}  // namespace ccc::kernels
