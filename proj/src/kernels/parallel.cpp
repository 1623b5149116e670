#include <algorithm>
#include <cmath>
#include <cstdint>

#include "ccc/kernels/kernels.hpp"

namespace ccc::kernels::parallel {

namespace {

// Row-wise inclusive prefix counts with a leading zero column: (w+1) per row.
std::vector<std::int32_t> row_prefix(const BinaryMask& m) {
  const int w = m.width();
  const int h = m.height();
  std::vector<std::int32_t> pre(static_cast<std::size_t>(w + 1) * h, 0);
  const auto bits = m.bits();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::int32_t* row = pre.data() + static_cast<std::size_t>(y) * (w + 1);
    const std::uint8_t* src = bits.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) row[x + 1] = row[x] + src[x];
  }
  return pre;
}

}  // namespace

BinaryMask threshold_hsv(const ImageRGB& img, const HsvRange& range) {
  BinaryMask out(img.width(), img.height());
  const auto src = img.bytes();
  auto dst = out.bits();
  const long long n = static_cast<long long>(img.pixel_count());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const Rgb p{src[3 * i], src[3 * i + 1], src[3 * i + 2]};
    dst[i] = range.contains(rgb_to_hsv(p)) ? 1 : 0;
  }
  return out;
}

std::size_t count(const BinaryMask& m) {
  const auto bits = m.bits();
  const long long n = static_cast<long long>(bits.size());
  long long total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (long long i = 0; i < n; ++i) total += bits[i];
  return static_cast<std::size_t>(total);
}

BinaryMask bit_and(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out(a.width(), a.height());
  const auto pa = a.bits();
  const auto pb = b.bits();
  auto po = out.bits();
  const long long n = static_cast<long long>(pa.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) po[i] = pa[i] & pb[i];
  return out;
}

BinaryMask bit_or(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out(a.width(), a.height());
  const auto pa = a.bits();
  const auto pb = b.bits();
  auto po = out.bits();
  const long long n = static_cast<long long>(pa.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) po[i] = pa[i] | pb[i];
  return out;
}

BinaryMask erode(const BinaryMask& m, int radius) {
  if (radius <= 0) return m;
  const int w = m.width();
  const int h = m.height();
  const auto widths = disc_half_widths(radius);
  const auto pre = row_prefix(m);
  BinaryMask out(w, h);
  auto dst = out.bits();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool keep = true;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int sy = y + dy;
        const int hw = widths[static_cast<std::size_t>(dy + radius)];
        if (sy < 0 || sy >= h || x - hw < 0 || x + hw >= w) {
          keep = false;
          break;
        }
        const std::int32_t* row = pre.data() + static_cast<std::size_t>(sy) * (w + 1);
        if (row[x + hw + 1] - row[x - hw] != 2 * hw + 1) {
          keep = false;
          break;
        }
      }
      dst[static_cast<std::size_t>(y) * w + x] = keep ? 1 : 0;
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& m, int radius) {
  if (radius <= 0) return m;
  const int w = m.width();
  const int h = m.height();
  const auto widths = disc_half_widths(radius);
  const auto pre = row_prefix(m);
  BinaryMask out(w, h);
  auto dst = out.bits();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        const int hw = widths[static_cast<std::size_t>(dy + radius)];
        const int lo = std::max(0, x - hw);
        const int hi = std::min(w - 1, x + hw);
        const std::int32_t* row = pre.data() + static_cast<std::size_t>(sy) * (w + 1);
        hit = row[hi + 1] - row[lo] > 0;
      }
      dst[static_cast<std::size_t>(y) * w + x] = hit ? 1 : 0;
    }
  }
  return out;
}

BinaryMask rasterize(std::span<const Point2> v, int width, int height) {
  BinaryMask out(width, height);
  auto dst = out.bits();
  const std::size_t n = v.size();
#pragma omp parallel
  {
    std::vector<double> xs;
#pragma omp for schedule(static)
    for (int y = 0; y < height; ++y) {
      const double cy = y + 0.5;
      xs.clear();
      for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        if ((a.y <= cy && cy < b.y) || (b.y <= cy && cy < a.y)) {
          xs.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
      std::sort(xs.begin(), xs.end());
      // First pixel whose centre is >= t, found with exact comparisons.
      auto first_at_or_after = [width](double t) {
        double c = std::ceil(t - 0.5);
        int i = c < 0 ? 0 : (c > width ? width : static_cast<int>(c));
        while (i > 0 && (i - 1) + 0.5 >= t) --i;
        while (i < width && i + 0.5 < t) ++i;
        return i;
      };
      std::uint8_t* row = dst.data() + static_cast<std::size_t>(y) * width;
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        const int x0 = first_at_or_after(xs[k]);
        const int x1 = first_at_or_after(xs[k + 1]);
        for (int x = x0; x < x1; ++x) row[x] = 1;
      }
    }
  }
  return out;
}

ImageRGB resize_bilinear(const ImageRGB& img, int width, int height) {
  if (width == img.width() && height == img.height()) return img;
  ImageRGB out(width, height);
  const float sx = static_cast<float>(img.width()) / width;
  const float sy = static_cast<float>(img.height()) / height;

  std::vector<int> xi0(width), xi1(width);
  std::vector<float> xw(width);
  for (int x = 0; x < width; ++x) {
    const float fx = std::clamp((x + 0.5f) * sx - 0.5f, 0.0f, img.width() - 1.0f);
    xi0[x] = static_cast<int>(fx);
    xi1[x] = std::min(xi0[x] + 1, img.width() - 1);
    xw[x] = fx - xi0[x];
  }

  const auto src = img.bytes();
  auto dst = out.bytes();
  const std::size_t src_stride = static_cast<std::size_t>(img.width()) * 3;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const float fy = std::clamp((y + 0.5f) * sy - 0.5f, 0.0f, img.height() - 1.0f);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const float wy = fy - y0;
    const std::uint8_t* r0 = src.data() + y0 * src_stride;
    const std::uint8_t* r1 = src.data() + y1 * src_stride;
    std::uint8_t* o = dst.data() + static_cast<std::size_t>(y) * width * 3;
    for (int x = 0; x < width; ++x) {
      const int a = xi0[x] * 3;
      const int b = xi1[x] * 3;
      const float wx = xw[x];
      for (int c = 0; c < 3; ++c) {
        const float top = r0[a + c] + (r0[b + c] - r0[a + c]) * wx;
        const float bot = r1[a + c] + (r1[b + c] - r1[a + c]) * wx;
        const float v = top + (bot - top) * wy;
        o[x * 3 + c] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5f), 0.0f, 255.0f));
      }
    }
  }
  return out;
}

}  // namespace ccc::kernels::parallel
