#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ccc/imaging/image.hpp"

namespace ccc {

struct Component {
  int id{0};
  std::size_t area{0};
  Box box;
};

/// 8-connected labelling. Ids are dense from 1 in raster order of each
/// component's first pixel; background is 0.
struct ComponentLabels {
  int width{0};
  int height{0};
  std::vector<std::int32_t> labels;
  std::vector<Component> components;

  std::int32_t at(int x, int y) const noexcept {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
  BinaryMask mask_of(int id) const;
};

ComponentLabels connected_components(const BinaryMask& m);

}  // namespace ccc
