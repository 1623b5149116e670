#include <algorithm>
#include <cmath>

#include "ccc/kernels/kernels.hpp"

namespace ccc::kernels {

std::vector<int> disc_half_widths(int radius) {
  std::vector<int> widths(static_cast<std::size_t>(2 * radius + 1), 0);
  const int limit = radius * (radius + 1);
  for (int dy = -radius; dy <= radius; ++dy) {
    int w = 0;
    while ((w + 1) * (w + 1) + dy * dy <= limit) ++w;
    widths[static_cast<std::size_t>(dy + radius)] = w;
  }
  return widths;
}

namespace {

std::uint8_t round_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

namespace serial {

BinaryMask threshold_hsv(const ImageRGB& img, const HsvRange& range) {
  BinaryMask out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.set(x, y, range.contains(rgb_to_hsv(img.at(x, y))));
    }
  }
  return out;
}

std::size_t count(const BinaryMask& m) {
  std::size_t n = 0;
  for (auto b : m.bits()) n += b;
  return n;
}

BinaryMask bit_and(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) out.set(x, y, a.at(x, y) && b.at(x, y));
  return out;
}

BinaryMask bit_or(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) out.set(x, y, a.at(x, y) || b.at(x, y));
  return out;
}

BinaryMask erode(const BinaryMask& m, int radius) {
  if (radius <= 0) return m;
  const int r2 = radius * (radius + 1);
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool keep = true;
      for (int dy = -radius; dy <= radius && keep; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > r2) continue;
          const int sx = x + dx;
          const int sy = y + dy;
          if (sx < 0 || sy < 0 || sx >= m.width() || sy >= m.height() || !m.at(sx, sy)) {
            keep = false;
            break;
          }
        }
      }
      out.set(x, y, keep);
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& m, int radius) {
  if (radius <= 0) return m;
  const int r2 = radius * (radius + 1);
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > r2) continue;
          const int sx = x + dx;
          const int sy = y + dy;
          if (sx >= 0 && sy >= 0 && sx < m.width() && sy < m.height() && m.at(sx, sy)) {
            hit = true;
            break;
          }
        }
      }
      out.set(x, y, hit);
    }
  }
  return out;
}

BinaryMask rasterize(std::span<const Point2> v, int width, int height) {
  BinaryMask out(width, height);
  const std::size_t n = v.size();
  for (int y = 0; y < height; ++y) {
    const double cy = y + 0.5;
    for (int x = 0; x < width; ++x) {
      const double cx = x + 0.5;
      int crossings = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        if ((a.y <= cy && cy < b.y) || (b.y <= cy && cy < a.y)) {
          const double ix = a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y);
          if (ix <= cx) ++crossings;
        }
      }
      out.set(x, y, (crossings & 1) != 0);
    }
  }
  return out;
}

ImageRGB resize_bilinear(const ImageRGB& img, int width, int height) {
  if (width == img.width() && height == img.height()) return img;
  ImageRGB out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      const Rgb p00 = img.at(x0, y0), p10 = img.at(x1, y0);
      const Rgb p01 = img.at(x0, y1), p11 = img.at(x1, y1);
      auto lerp2 = [&](double c00, double c10, double c01, double c11) {
        const double top = c00 + (c10 - c00) * wx;
        const double bot = c01 + (c11 - c01) * wx;
        return top + (bot - top) * wy;
      };
      out.set(x, y,
              {round_channel(lerp2(p00.r, p10.r, p01.r, p11.r)),
               round_channel(lerp2(p00.g, p10.g, p01.g, p11.g)),
               round_channel(lerp2(p00.b, p10.b, p01.b, p11.b))});
    }
  }
  return out;
}

}  // namespace serial
}  // namespace ccc::kernels
