#pragma once

#include "ccc/imaging/image.hpp"

namespace ccc {

// Structuring element: digital disc {dx^2 + dy^2 <= r(r+1)}, so radius 1 is
// the 3x3 square. Pixels outside the frame are treated as clear.

BinaryMask erode(const BinaryMask& m, int radius);
BinaryMask dilate(const BinaryMask& m, int radius);

/// Erosion followed by dilation. Radius 0 is the identity; negative radii
/// throw InvalidArgument.
BinaryMask morphological_open(const BinaryMask& m, int radius);

}  // namespace ccc
