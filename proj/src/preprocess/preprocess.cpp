#include "ccc/preprocess/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ccc/error.hpp"
#include "ccc/imaging/hsv.hpp"
#include "ccc/kernels/kernels.hpp"
#include "ccc/util.hpp"

namespace ccc {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Reflect-101 index into [0, n).
int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

ImageRGB crop(const ImageRGB& img, int x0, int y0, int w, int h) {
  ImageRGB out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, img.at(x0 + x, y0 + y));
  return out;
}

ImageRGB random_crop(const ImageRGB& img, const AugmentDraw& d) {
  const int w = img.width();
  const int h = img.height();
  const double side = std::sqrt(d.crop_scale);
  const int cw = std::clamp(static_cast<int>(std::lround(w * side)), 1, w);
  const int ch = std::clamp(static_cast<int>(std::lround(h * side)), 1, h);
  if (cw == w && ch == h) return img;
  const int x0 = std::min(w - cw, static_cast<int>(std::floor(d.crop_x * (w - cw + 1))));
  const int y0 = std::min(h - ch, static_cast<int>(std::floor(d.crop_y * (h - ch + 1))));
  return kernels::parallel::resize_bilinear(crop(img, x0, y0, cw, ch), w, h);
}

ImageRGB rotate(const ImageRGB& img, double degrees, Rgb fill) {
  const int w = img.width();
  const int h = img.height();
  const double th = degrees * M_PI / 180.0;
  const double c = std::cos(th);
  const double s = std::sin(th);
  const double cx = w / 2.0;
  const double cy = h / 2.0;
  ImageRGB out(w, h);
  auto sample = [&](int x, int y, int ch) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) {
      return ch == 0 ? fill.r : ch == 1 ? fill.g : fill.b;
    }
    const Rgb p = img.at(x, y);
    return ch == 0 ? p.r : ch == 1 ? p.g : p.b;
  };
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      const double sx = c * dx + s * dy + cx - 0.5;
      const double sy = -s * dx + c * dy + cy - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      std::uint8_t v[3];
      for (int ch = 0; ch < 3; ++ch) {
        const double top = sample(x0, y0, ch) * (1 - fx) + sample(x0 + 1, y0, ch) * fx;
        const double bot = sample(x0, y0 + 1, ch) * (1 - fx) + sample(x0 + 1, y0 + 1, ch) * fx;
        v[ch] = to_byte(top * (1 - fy) + bot * fy);
      }
      out.set(x, y, {v[0], v[1], v[2]});
    }
  }
  return out;
}

ImageRGB flip(const ImageRGB& img, bool horizontal, bool vertical) {
  if (!horizontal && !vertical) return img;
  const int w = img.width();
  const int h = img.height();
  ImageRGB out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.set(x, y, img.at(horizontal ? w - 1 - x : x, vertical ? h - 1 - y : y));
  return out;
}

double luma(Rgb p) { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; }

ImageRGB jitter(ImageRGB img, const AugmentDraw& d) {
  auto bytes = img.bytes();
  if (d.brightness != 1.0) {
    for (auto& b : bytes) b = to_byte(b * d.brightness);
  }
  if (d.contrast != 1.0) {
    double mean = 0.0;
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) mean += luma(img.at(x, y));
    mean /= static_cast<double>(img.pixel_count());
    for (auto& b : bytes) b = to_byte(mean + d.contrast * (b - mean));
  }
  if (d.saturation != 1.0) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const Rgb p = img.at(x, y);
        const double g = luma(p);
        img.set(x, y, {to_byte(g + d.saturation * (p.r - g)), to_byte(g + d.saturation * (p.g - g)),
                       to_byte(g + d.saturation * (p.b - g))});
      }
    }
  }
  if (d.hue_shift != 0) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        PixelHSV p = rgb_to_hsv(img.at(x, y));
        if (p.s == 0) continue;
        p.h = static_cast<std::uint8_t>(((p.h + d.hue_shift) % 180 + 180) % 180);
        img.set(x, y, hsv_to_rgb(p));
      }
    }
  }
  return img;
}

}  // namespace

ImageRGB pad_to_square(const ImageRGB& img, Rgb fill) {
  const int w = img.width();
  const int h = img.height();
  const int side = std::max(w, h);
  if (w == h) return img;
  ImageRGB out(side, side, fill);
  const int left = (side - w) / 2;
  const int top = (side - h) / 2;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(left + x, top + y, img.at(x, y));
  return out;
}

ImageRGB resize_bilinear(const ImageRGB& img, int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("resize target must be positive, got {}x{}", width, height));
  }
  return kernels::parallel::resize_bilinear(img, width, height);
}

ImageRGB standardize(const ImageRGB& img, Rgb fill) {
  return resize_bilinear(pad_to_square(img, fill), kStandardSize, kStandardSize);
}

ImageRGB gaussian_blur(const ImageRGB& img, double sigma) {
  if (!(sigma > 0.0)) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;

  const int w = img.width();
  const int h = img.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);
  const auto src = img.bytes();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int sx = reflect101(x + i, w);
          acc += k[static_cast<std::size_t>(i + radius)] *
                 src[(static_cast<std::size_t>(y) * w + sx) * 3 + ch];
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + ch] = acc;
      }
    }
  }
  ImageRGB out(w, h);
  auto dst = out.bytes();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int sy = reflect101(y + i, h);
          acc += k[static_cast<std::size_t>(i + radius)] *
                 tmp[(static_cast<std::size_t>(sy) * w + x) * 3 + ch];
        }
        dst[(static_cast<std::size_t>(y) * w + x) * 3 + ch] = to_byte(acc);
      }
    }
  }
  return out;
}

AugmentDraw draw_augment(const AugmentParams& p) {
  if (!(p.crop_scale_min > 0.0) || p.crop_scale_min > p.crop_scale_max || p.crop_scale_max > 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("crop scale interval [{}, {}] must lie in (0, 1]", p.crop_scale_min,
                            p.crop_scale_max));
  }
  if (p.rotation_max_deg < 0 || p.brightness < 0 || p.contrast < 0 || p.saturation < 0 ||
      p.hue < 0 || p.blur_sigma < 0) {
    throw Error(ErrorCode::InvalidArgument, "augmentation bounds must be non-negative");
  }
  // Every value is drawn, in this order, whether or not its step is enabled,
  // so toggling one step never shifts the draws of another.
  Rng rng(p.seed);
  AugmentDraw d;
  d.crop_scale = rng.uniform(p.crop_scale_min, p.crop_scale_max);
  d.crop_x = rng.uniform();
  d.crop_y = rng.uniform();
  d.rotation_deg = rng.uniform(0.0, p.rotation_max_deg);
  const bool h = rng.bernoulli(0.5);
  const bool v = rng.bernoulli(0.5);
  d.hflip = p.hflip && h;
  d.vflip = p.vflip && v;
  d.brightness = 1.0 + rng.uniform(-p.brightness, p.brightness);
  d.contrast = 1.0 + rng.uniform(-p.contrast, p.contrast);
  d.saturation = 1.0 + rng.uniform(-p.saturation, p.saturation);
  d.hue_shift = static_cast<int>(rng.uniform_int(-p.hue, p.hue));
  d.blur_sigma = rng.uniform(0.0, p.blur_sigma);
  return d;
}

ImageRGB apply_augment(const ImageRGB& img, const AugmentDraw& d) {
  ImageRGB out = random_crop(img, d);
  if (d.rotation_deg != 0.0) out = rotate(out, d.rotation_deg, kPadGray);
  out = flip(out, d.hflip, d.vflip);
  out = jitter(std::move(out), d);
  return gaussian_blur(out, d.blur_sigma);
}

ImageRGB augment(const ImageRGB& img, const AugmentParams& params) {
  return apply_augment(img, draw_augment(params));
}

std::uint64_t variant_seed(std::uint64_t base_seed, const std::string& id, int k) {
  return base_seed + stable_hash(id, static_cast<std::uint64_t>(k));
}

std::vector<AugmentedImage> expand_fivefold(std::span<const NamedImage> imgs,
                                            std::uint64_t base_seed,
                                            const AugmentParams& params) {
  std::vector<AugmentedImage> out(imgs.size() * kExpansionFactor);
  const long long n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    const auto& src = imgs[static_cast<std::size_t>(i / kExpansionFactor)];
    const int k = static_cast<int>(i % kExpansionFactor);
    AugmentParams p = params;
    p.seed = variant_seed(base_seed, src.id, k);
    out[static_cast<std::size_t>(i)] = {src.id, k, p.seed, augment(src.image, p)};
  }
  return out;
}

}  // namespace ccc
