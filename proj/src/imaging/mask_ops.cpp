#include "ccc/imaging/mask_ops.hpp"

#include <algorithm>
#include <string>

#include "ccc/error.hpp"
#include "ccc/kernels/kernels.hpp"

namespace ccc {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask shapes differ: " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

std::size_t mask_area(const BinaryMask& m) { return kernels::parallel::count(m); }

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  return kernels::parallel::bit_and(a, b);
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  return kernels::parallel::bit_or(a, b);
}

std::optional<Box> mask_bbox(const BinaryMask& m) {
  int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return std::nullopt;
  return Box{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

BinaryMask box_mask(int width, int height, const Box& box) {
  BinaryMask m(width, height);
  const int xa = std::max(0, box.x), xb = std::min(width, box.x + box.w);
  const int ya = std::max(0, box.y), yb = std::min(height, box.y + box.h);
  for (int y = ya; y < yb; ++y)
    for (int x = xa; x < xb; ++x) m.set(x, y);
  return m;
}

}  // namespace ccc
