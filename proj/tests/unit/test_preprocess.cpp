#include <gtest/gtest.h>

#include <cmath>

#include "ccc/error.hpp"
#include "ccc/preprocess/preprocess.hpp"
#include "test_support.hpp"

namespace ccc {
namespace {

AugmentParams identity_params(std::uint64_t seed) {
  AugmentParams p;
  p.crop_scale_min = p.crop_scale_max = 1.0;
  p.rotation_max_deg = 0.0;
  p.hflip = p.vflip = false;
  p.brightness = p.contrast = p.saturation = 0.0;
  p.hue = 0;
  p.blur_sigma = 0.0;
  p.seed = seed;
  return p;
}

std::array<double, 3> channel_means(const ImageRGB& img) {
  std::array<double, 3> m{};
  const auto b = img.bytes();
  for (std::size_t i = 0; i < b.size(); ++i) m[i % 3] += b[i];
  for (auto& v : m) v /= static_cast<double>(img.pixel_count());
  return m;
}

// Independent bilinear reference: half-pixel centres, clamped taps, no rounding.
double reference_bilinear(const ImageRGB& img, int w, int h, int x, int y, int ch) {
  const double sx = std::clamp((x + 0.5) * img.width() / w - 0.5, 0.0, img.width() - 1.0);
  const double sy = std::clamp((y + 0.5) * img.height() / h - 0.5, 0.0, img.height() - 1.0);
  const int x0 = static_cast<int>(sx);
  const int y0 = static_cast<int>(sy);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  auto v = [&](int px, int py) {
    const Rgb p = img.at(px, py);
    return double(ch == 0 ? p.r : ch == 1 ? p.g : p.b);
  };
  const double fx = sx - x0, fy = sy - y0;
  return (v(x0, y0) * (1 - fx) + v(x1, y0) * fx) * (1 - fy) + (v(x0, y1) * (1 - fx) + v(x1, y1) * fx) * fy;
}

TEST(PadToSquare, WideImageGetsEqualTopAndBottom) {
  const ImageRGB img(100, 50, Rgb{10, 20, 30});
  const ImageRGB out = pad_to_square(img);
  ASSERT_EQ(out.width(), 100);
  ASSERT_EQ(out.height(), 100);
  for (int y = 0; y < 100; ++y) {
    const Rgb expect = (y >= 25 && y < 75) ? Rgb{10, 20, 30} : kPadGray;
    for (int x = 0; x < 100; ++x) ASSERT_EQ(out.at(x, y), expect) << x << "," << y;
  }
}

TEST(PadToSquare, OddPaddingGoesBottom) {
  const ImageRGB img(101, 100, Rgb{1, 2, 3});
  const ImageRGB out = pad_to_square(img);
  ASSERT_EQ(out.width(), 101);
  ASSERT_EQ(out.height(), 101);
  EXPECT_EQ(out.at(50, 0), (Rgb{1, 2, 3}));
  EXPECT_EQ(out.at(50, 99), (Rgb{1, 2, 3}));
  EXPECT_EQ(out.at(50, 100), kPadGray);
}

TEST(PadToSquare, OddPaddingGoesRight) {
  const ImageRGB out = pad_to_square(ImageRGB(2, 5, Rgb{9, 9, 9}));
  EXPECT_EQ(out.at(0, 0), kPadGray);
  EXPECT_EQ(out.at(1, 0), (Rgb{9, 9, 9}));
  EXPECT_EQ(out.at(2, 0), (Rgb{9, 9, 9}));
  EXPECT_EQ(out.at(3, 0), kPadGray);
  EXPECT_EQ(out.at(4, 0), kPadGray);
}

TEST(PadToSquare, SquareIsUnchanged) {
  Rng rng(1);
  const ImageRGB img = testing::random_image(rng, 224, 224);
  EXPECT_EQ(pad_to_square(img), img);
}

TEST(PadToSquare, ContentPreservedOnRandomShapes) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const int w = static_cast<int>(rng.uniform_int(1, 90));
    const int h = static_cast<int>(rng.uniform_int(1, 90));
    const ImageRGB img = testing::random_image(rng, w, h);
    const ImageRGB out = pad_to_square(img);
    const int s = std::max(w, h);
    ASSERT_EQ(out.width(), s);
    const int left = (s - w) / 2, top = (s - h) / 2;
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        const bool inside = x >= left && x < left + w && y >= top && y < top + h;
        ASSERT_EQ(out.at(x, y), inside ? img.at(x - left, y - top) : kPadGray);
      }
    }
  }
}

TEST(ResizeBilinear, UniformStaysUniform) {
  const ImageRGB img(37, 91, Rgb{12, 200, 77});
  const ImageRGB out = resize_bilinear(img, 224, 224);
  EXPECT_EQ(out, ImageRGB(224, 224, Rgb{12, 200, 77}));
}

TEST(ResizeBilinear, MonotoneRamp) {
  ImageRGB img(2, 1);
  img.set(1, 0, {255, 255, 255});
  const ImageRGB out = resize_bilinear(img, 4, 1);
  for (int x = 1; x < 4; ++x) {
    EXPECT_GE(out.at(x, 0).r, out.at(x - 1, 0).r);
    EXPECT_GE(out.at(x, 0).g, out.at(x - 1, 0).g);
    EXPECT_GE(out.at(x, 0).b, out.at(x - 1, 0).b);
  }
  EXPECT_EQ(out.at(0, 0).r, 0);
  EXPECT_EQ(out.at(3, 0).r, 255);
}

TEST(ResizeBilinear, IdentityIsExact) {
  Rng rng(3);
  const ImageRGB img = testing::random_image(rng, 31, 17);
  EXPECT_EQ(resize_bilinear(img, 31, 17), img);
}

TEST(ResizeBilinear, WithinOneOfFloatReference) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const ImageRGB img = testing::random_image(rng, static_cast<int>(rng.uniform_int(1, 60)),
                                               static_cast<int>(rng.uniform_int(1, 60)));
    const int w = static_cast<int>(rng.uniform_int(1, 100));
    const int h = static_cast<int>(rng.uniform_int(1, 100));
    const ImageRGB out = resize_bilinear(img, w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Rgb p = out.at(x, y);
        const int got[3] = {p.r, p.g, p.b};
        for (int c = 0; c < 3; ++c) ASSERT_LE(std::abs(got[c] - reference_bilinear(img, w, h, x, y, c)), 1.0);
      }
    }
  }
}

TEST(ResizeBilinear, RejectsEmptyTarget) {
  EXPECT_THROW(resize_bilinear(ImageRGB(4, 4), 0, 4), Error);
}

TEST(Standardize, AlwaysProducesStandardSize) {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const ImageRGB img = testing::random_image(rng, static_cast<int>(rng.uniform_int(1, 300)),
                                               static_cast<int>(rng.uniform_int(1, 300)));
    const ImageRGB out = standardize(img);
    EXPECT_EQ(out.width(), kStandardSize);
    EXPECT_EQ(out.height(), kStandardSize);
    EXPECT_EQ(standardize(img), out);
  }
}

TEST(Augment, SameSeedSameBytes) {
  Rng rng(6);
  const ImageRGB img = testing::random_image(rng, 48, 40);
  AugmentParams p;
  p.seed = 12345;
  EXPECT_EQ(augment(img, p), augment(img, p));
  p.seed = 12346;
  EXPECT_NE(augment(img, p), augment(img, {.seed = 12345}));
}

TEST(Augment, NeutralParamsAreIdentity) {
  Rng rng(7);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImageRGB img = testing::random_image(rng, 33, 29);
    EXPECT_EQ(augment(img, identity_params(seed)), img);
  }
}

TEST(Augment, BlurPreservesChannelMeans) {
  Rng rng(8);
  const ImageRGB img = testing::random_image(rng, 64, 64);
  const auto before = channel_means(img);
  const auto direct = channel_means(gaussian_blur(img, 2.0));
  AugmentParams p = identity_params(99);
  p.blur_sigma = 2.0;
  const auto drawn = channel_means(augment(img, p));
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(direct[c], before[c], 1.0);
    EXPECT_NEAR(drawn[c], before[c], 1.0);
  }
}

TEST(Augment, DimsPreservedForRandomParams) {
  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    const ImageRGB img = testing::random_image(rng, static_cast<int>(rng.uniform_int(1, 50)),
                                               static_cast<int>(rng.uniform_int(1, 50)));
    AugmentParams p;
    p.crop_scale_min = rng.uniform(0.1, 1.0);
    p.crop_scale_max = rng.uniform(p.crop_scale_min, 1.0);
    p.blur_sigma = rng.uniform(0, 3);
    p.hue = static_cast<int>(rng.uniform_int(0, 30));
    p.seed = rng.next();
    const ImageRGB out = augment(img, p);
    EXPECT_EQ(out.width(), img.width());
    EXPECT_EQ(out.height(), img.height());
  }
}

TEST(Augment, DrawsStayInsideBounds) {
  AugmentParams p;
  for (std::uint64_t s = 0; s < 500; ++s) {
    p.seed = s;
    const AugmentDraw d = draw_augment(p);
    ASSERT_GE(d.crop_scale, 0.8);
    ASSERT_LE(d.crop_scale, 1.0);
    ASSERT_GE(d.rotation_deg, 0.0);
    ASSERT_LT(d.rotation_deg, 360.0);
    ASSERT_LE(std::abs(d.brightness - 1.0), 0.2);
    ASSERT_LE(std::abs(d.contrast - 1.0), 0.2);
    ASSERT_LE(std::abs(d.saturation - 1.0), 0.2);
    ASSERT_LE(std::abs(d.hue_shift), 10);
    ASSERT_GE(d.blur_sigma, 0.0);
    ASSERT_LE(d.blur_sigma, 1.0);
  }
}

TEST(Augment, FlipOnlyMirrors) {
  Rng rng(10);
  const ImageRGB img = testing::random_image(rng, 9, 7);
  AugmentDraw d;
  d.hflip = true;
  const ImageRGB out = apply_augment(img, d);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) ASSERT_EQ(out.at(x, y), img.at(8 - x, y));
}

TEST(Augment, QuarterTurnOnSquareIsExactPermutation) {
  Rng rng(11);
  const ImageRGB img = testing::random_image(rng, 8, 8);
  AugmentDraw d;
  d.rotation_deg = 90.0;
  const ImageRGB out = apply_augment(img, d);
  // Sampling lands on pixel centres (up to rounding of cos 90°), so every
  // output pixel is one input pixel.
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) ASSERT_EQ(out.at(x, y), img.at(y, 7 - x)) << x << "," << y;
}

TEST(Augment, RejectsBadCropInterval) {
  AugmentParams p;
  p.crop_scale_min = 0.0;
  EXPECT_THROW(draw_augment(p), Error);
  p.crop_scale_min = 0.9;
  p.crop_scale_max = 0.8;
  EXPECT_THROW(draw_augment(p), Error);
}

std::vector<NamedImage> tiny_images(int n, const std::string& prefix) {
  std::vector<NamedImage> v;
  for (int i = 0; i < n; ++i) v.push_back({prefix + std::to_string(i), ImageRGB(4, 4, Rgb{100, 50, 25})});
  return v;
}

TEST(ExpandFivefold, TrainingFoldCountsScaleByFive) {
  // Fold 0 of the five-fold protocol: 682 cluster + 572 non-cluster images.
  const auto cluster = tiny_images(682, "c");
  const auto non_cluster = tiny_images(572, "n");
  const auto a = expand_fivefold(cluster, 7);
  const auto b = expand_fivefold(non_cluster, 7);
  EXPECT_EQ(a.size(), 3410u);
  EXPECT_EQ(b.size(), 2860u);
  EXPECT_EQ(a.size() + b.size(), 6270u);
}

TEST(ExpandFivefold, EmptyInput) { EXPECT_TRUE(expand_fivefold({}, 1).empty()); }

TEST(ExpandFivefold, DeterministicAndSeededPerVariant) {
  Rng rng(12);
  std::vector<NamedImage> imgs;
  for (int i = 0; i < 3; ++i) imgs.push_back({"img" + std::to_string(i), testing::random_image(rng, 20, 20)});
  const auto a = expand_fivefold(imgs, 42);
  const auto b = expand_fivefold(imgs, 42);
  ASSERT_EQ(a.size(), 15u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].image, b[i].image);
    EXPECT_EQ(a[i].source_id, imgs[i / 5].id);
    EXPECT_EQ(a[i].variant, static_cast<int>(i % 5));
    EXPECT_EQ(a[i].seed, variant_seed(42, a[i].source_id, a[i].variant));
  }
  const auto c = expand_fivefold(imgs, 43);
  EXPECT_NE(a[0].image, c[0].image);
}

TEST(ExpandFivefold, ThreadCountDoesNotChangeOutput) {
  Rng rng(13);
  std::vector<NamedImage> imgs;
  for (int i = 0; i < 4; ++i) imgs.push_back({"x" + std::to_string(i), testing::random_image(rng, 24, 16)});
  set_num_threads(1);
  const auto a = expand_fivefold(imgs, 5);
  set_num_threads(4);
  const auto b = expand_fivefold(imgs, 5);
  set_num_threads(0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].image, b[i].image);
}

}  // namespace
}  // namespace ccc
