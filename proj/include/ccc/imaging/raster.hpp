#pragma once

#include <span>
#include <vector>

#include "ccc/imaging/image.hpp"

namespace ccc {

/// Even-odd fill sampled at pixel centres. Rows are half-open in y and spans
/// are half-open in x, so a centre exactly on a left/top edge is inside and
/// one on a right/bottom edge is outside.
/// Throws DegeneratePolygon for fewer than 3 vertices, InvalidArgument for
/// coordinates outside [0,1].
BinaryMask rasterize_polygon(const Polygon& poly, int width, int height);

/// Union of the individual even-odd fills.
BinaryMask rasterize_polygons(std::span<const Polygon> polys, int width, int height);

/// Outer contour of every 8-connected component, in component-id order.
/// Vertices sit on pixel corners, so rasterizing a contour reproduces its
/// component exactly (holes are filled).
std::vector<Polygon> mask_to_polygons(const BinaryMask& m);

}  // namespace ccc
