#pragma once

#include <cstddef>
#include <optional>

#include "ccc/imaging/image.hpp"

namespace ccc {

std::size_t mask_area(const BinaryMask& m);

/// Bitwise AND; throws DimensionMismatch on differing shapes.
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);

/// Tight bounding box of the set bits, or nullopt for an empty mask.
std::optional<Box> mask_bbox(const BinaryMask& m);

/// Filled rectangle mask, clipped to the frame.
BinaryMask box_mask(int width, int height, const Box& box);

void require_same_shape(const BinaryMask& a, const BinaryMask& b);

}  // namespace ccc
