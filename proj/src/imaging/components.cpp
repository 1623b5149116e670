#include "ccc/imaging/components.hpp"

#include <algorithm>
#include <utility>

namespace ccc {

BinaryMask ComponentLabels::mask_of(int id) const {
  BinaryMask m(width, height);
  auto bits = m.bits();
  for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = labels[i] == id ? 1 : 0;
  return m;
}

ComponentLabels connected_components(const BinaryMask& m) {
  ComponentLabels out;
  out.width = m.width();
  out.height = m.height();
  out.labels.assign(m.pixel_count(), 0);

  const int w = m.width();
  const int h = m.height();
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t start = static_cast<std::size_t>(y) * w + x;
      if (!m.at(x, y) || out.labels[start] != 0) continue;

      const int id = static_cast<int>(out.components.size()) + 1;
      Component comp{id, 0, {x, y, 1, 1}};
      int x0 = x, y0 = y, x1 = x, y1 = y;
      out.labels[start] = id;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++comp.area;
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
            if (!m.at(nx, ny) || out.labels[ni] != 0) continue;
            out.labels[ni] = id;
            stack.emplace_back(nx, ny);
          }
        }
      }
      comp.box = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
      out.components.push_back(comp);
    }
  }
  return out;
}

}  // namespace ccc
