#include <gtest/gtest.h>

#include <set>
#include <utility>

#include "ccc/error.hpp"
#include "ccc/imaging/components.hpp"
#include "ccc/imaging/hsv.hpp"
#include "ccc/imaging/mask_ops.hpp"
#include "ccc/imaging/morphology.hpp"
#include "ccc/imaging/raster.hpp"
#include "test_support.hpp"

namespace ccc {
namespace {

using testing::random_blob;
using testing::random_mask;
using testing::reference_hsv;

// ---------------------------------------------------------------- HSV

TEST(RgbToHsv, PrimaryAndAchromaticExamples) {
  EXPECT_EQ(rgb_to_hsv({0, 255, 0}), (PixelHSV{60, 255, 255}));
  EXPECT_EQ(rgb_to_hsv({255, 255, 0}), (PixelHSV{30, 255, 255}));
  EXPECT_EQ(rgb_to_hsv({173, 173, 173}), (PixelHSV{0, 0, 173}));
  EXPECT_EQ(rgb_to_hsv({0, 0, 0}), (PixelHSV{0, 0, 0}));
  EXPECT_EQ(rgb_to_hsv({255, 0, 0}), (PixelHSV{0, 255, 255}));
  EXPECT_EQ(rgb_to_hsv({0, 0, 255}), (PixelHSV{120, 255, 255}));
}

TEST(RgbToHsv, MatchesHexconeReferenceExhaustively) {
  long mismatches = 0;
  for (int r = 0; r < 256; ++r) {
    for (int g = 0; g < 256; ++g) {
      for (int b = 0; b < 256; ++b) {
        const Rgb p{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                    static_cast<std::uint8_t>(b)};
        const PixelHSV got = rgb_to_hsv(p);
        if (!(got == reference_hsv(p))) ++mismatches;
        if (got.s == 0 && got.h != 0) ++mismatches;
        if (got.h >= 180) ++mismatches;
      }
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(HsvToRgb, RoundTripsSaturatedColoursClosely) {
  Rng rng(11);
  for (int i = 0; i < 5000; ++i) {
    const PixelHSV p{static_cast<std::uint8_t>(rng.uniform_int(0, 179)),
                     static_cast<std::uint8_t>(rng.uniform_int(150, 255)),
                     static_cast<std::uint8_t>(rng.uniform_int(150, 255))};
    const PixelHSV back = rgb_to_hsv(hsv_to_rgb(p));
    int dh = std::abs(int(back.h) - int(p.h));
    dh = std::min(dh, 180 - dh);
    EXPECT_LE(dh, 2);
    EXPECT_LE(std::abs(int(back.s) - int(p.s)), 3);
    EXPECT_LE(std::abs(int(back.v) - int(p.v)), 1);
  }
}

TEST(ThresholdHsv, GreenRangeOnPureGreen) {
  const ImageRGB img(8, 6, Rgb{0, 255, 0});
  const BinaryMask m = threshold_hsv(img, {{35, 100, 140}, {85, 255, 255}});
  EXPECT_EQ(mask_area(m), 48u);
  EXPECT_EQ(m.width(), 8);
  EXPECT_EQ(m.height(), 6);
}

TEST(ThresholdHsv, PaddingGrayIsNeverSelected) {
  const ImageRGB img(5, 5, kPadGray);
  EXPECT_EQ(mask_area(threshold_hsv(img, {{35, 100, 140}, {85, 255, 255}})), 0u);
}

TEST(ThresholdHsv, BelowBrightnessLimitIsClear) {
  // hsv (60,255,120): pure green at value 120.
  const Rgb dim{0, 120, 0};
  ASSERT_EQ(rgb_to_hsv(dim), (PixelHSV{60, 255, 120}));
  const ImageRGB img(3, 3, dim);
  EXPECT_EQ(mask_area(threshold_hsv(img, {{35, 100, 140}, {85, 255, 255}})), 0u);
}

TEST(ThresholdHsv, FullRangeSetsEveryBit) {
  Rng rng(3);
  const ImageRGB img = testing::random_image(rng, 40, 30);
  EXPECT_EQ(mask_area(threshold_hsv(img, kFullHsvRange)), 1200u);
}

TEST(ThresholdHsv, RejectsInvertedRange) {
  const ImageRGB img(2, 2);
  try {
    threshold_hsv(img, {{90, 0, 0}, {10, 255, 255}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

// ---------------------------------------------------------------- masks

TEST(MaskArea, EmptyAndFull) {
  EXPECT_EQ(mask_area(BinaryMask(10, 10)), 0u);
  EXPECT_EQ(mask_area(BinaryMask(10, 10, true)), 100u);
}

TEST(MaskArea, RasterizedCentredSquareMatchesEnumeration) {
  const Polygon sq{{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}}};
  // Enumerate pixel centres inside [1,3) x [1,3) in pixel units.
  std::size_t expected = 0;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      if (x + 0.5 >= 1.0 && x + 0.5 < 3.0 && y + 0.5 >= 1.0 && y + 0.5 < 3.0) ++expected;
  EXPECT_EQ(expected, 4u);
  EXPECT_EQ(mask_area(rasterize_polygon(sq, 4, 4)), expected);
}

TEST(MaskIntersection, IdempotentAndEmpty) {
  Rng rng(5);
  const BinaryMask a = random_mask(rng, 17, 13, 0.4);
  EXPECT_EQ(mask_intersection(a, a), a);
  EXPECT_EQ(mask_area(mask_intersection(a, BinaryMask(17, 13))), 0u);
}

TEST(MaskIntersection, ShiftedHalfPlanes) {
  BinaryMask a(10, 10), b(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      a.set(x, y, x < 5);
      b.set(x, y, x >= 2 && x < 7);
    }
  }
  std::size_t expected = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) expected += (x < 5) && (x >= 2 && x < 7);
  EXPECT_EQ(expected, 30u);
  EXPECT_EQ(mask_area(mask_intersection(a, b)), expected);
}

TEST(MaskIntersection, DimensionMismatchThrows) {
  try {
    mask_intersection(BinaryMask(4, 4), BinaryMask(4, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(MaskIntersection, AreaBoundedByOperandsProperty) {
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    const int w = static_cast<int>(rng.uniform_int(1, 40));
    const int h = static_cast<int>(rng.uniform_int(1, 40));
    const BinaryMask a = random_mask(rng, w, h, rng.uniform());
    const BinaryMask b = random_mask(rng, w, h, rng.uniform());
    EXPECT_LE(mask_area(mask_intersection(a, b)), std::min(mask_area(a), mask_area(b)));
  }
}

TEST(MaskBbox, TightBox) {
  BinaryMask m(10, 8);
  m.set(2, 3);
  m.set(6, 5);
  EXPECT_EQ(*mask_bbox(m), (Box{2, 3, 5, 3}));
  EXPECT_FALSE(mask_bbox(BinaryMask(3, 3)).has_value());
}

// ---------------------------------------------------------------- raster

TEST(Rasterize, FullCoverSquare) {
  const Polygon sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  EXPECT_EQ(mask_area(rasterize_polygon(sq, 4, 4)), 16u);
}

TEST(Rasterize, TriangleAreaNearAnalytic) {
  const Polygon tri{{{0, 0}, {1, 0}, {0, 1}}};
  const double area = static_cast<double>(mask_area(rasterize_polygon(tri, 100, 100)));
  EXPECT_NEAR(area, 5000.0, 0.02 * 5000.0);
  // Pixel-centre oracle: centre (x+.5, y+.5) strictly below the hypotenuse
  // x + y = 100, or on it (left edge of the span).
  std::size_t expected = 0;
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) expected += (x + 0.5) < (100.0 - (y + 0.5));
  EXPECT_EQ(static_cast<std::size_t>(area), expected);
}

TEST(Rasterize, DegeneratePolygonThrows) {
  const Polygon two{{{0, 0}, {1, 1}}};
  try {
    rasterize_polygon(two, 10, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegeneratePolygon);
  }
}

TEST(Rasterize, OutOfRangeCoordinateThrows) {
  const Polygon p{{{0, 0}, {1.2, 0}, {0, 1}}};
  EXPECT_THROW(rasterize_polygon(p, 10, 10), Error);
}

TEST(Rasterize, EvenOddForSelfIntersectingBowtie) {
  // Bow-tie with lobes on the left and right; top and bottom stay clear.
  const Polygon bow{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}};
  const BinaryMask m = rasterize_polygon(bow, 20, 20);
  EXPECT_TRUE(m.at(2, 10));
  EXPECT_TRUE(m.at(17, 10));
  EXPECT_FALSE(m.at(10, 2));
  EXPECT_FALSE(m.at(10, 17));
}

TEST(Rasterize, CentreOnEdgeTieRule) {
  // Left edge at x = 1.5 px passes through centres of column 1: inside.
  // Right edge at x = 3.5 px passes through centres of column 3: outside.
  const Polygon p{{{1.5 / 8, 0}, {3.5 / 8, 0}, {3.5 / 8, 1}, {1.5 / 8, 1}}};
  const BinaryMask m = rasterize_polygon(p, 8, 8);
  for (int y = 0; y < 8; ++y) {
    EXPECT_FALSE(m.at(0, y));
    EXPECT_TRUE(m.at(1, y));
    EXPECT_TRUE(m.at(2, y));
    EXPECT_FALSE(m.at(3, y));
  }
}

TEST(MaskToPolygons, EmptyMaskGivesNothing) {
  EXPECT_TRUE(mask_to_polygons(BinaryMask(12, 9)).empty());
}

TEST(MaskToPolygons, RectangleRoundTripsExactly) {
  const BinaryMask m = box_mask(40, 30, {5, 7, 20, 11});
  const auto polys = mask_to_polygons(m);
  ASSERT_EQ(polys.size(), 1u);
  EXPECT_EQ(polys[0].vertices.size(), 4u);
  EXPECT_EQ(rasterize_polygons(polys, 40, 30), m);
}

TEST(MaskToPolygons, TwoDisjointBlobs) {
  BinaryMask m = box_mask(30, 30, {2, 2, 6, 6});
  m = mask_union(m, box_mask(30, 30, {15, 18, 7, 5}));
  EXPECT_EQ(mask_to_polygons(m).size(), 2u);
}

TEST(MaskToPolygons, DiagonalPinchStaysOneContour) {
  BinaryMask m(6, 6);
  m.set(1, 1);
  m.set(2, 2);
  m.set(3, 1);
  m.set(0, 5);
  const auto polys = mask_to_polygons(m);
  ASSERT_EQ(polys.size(), 2u);
  EXPECT_EQ(rasterize_polygons(polys, 6, 6), m);
}

TEST(MaskToPolygons, RandomBlobRoundTripProperty) {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const int w = static_cast<int>(rng.uniform_int(30, 90));
    const int h = static_cast<int>(rng.uniform_int(30, 90));
    const BinaryMask blob = random_blob(rng, w, h);
    if (mask_area(blob) < 25) continue;
    const BinaryMask back = rasterize_polygons(mask_to_polygons(blob), w, h);
    const double inter = static_cast<double>(mask_area(mask_intersection(blob, back)));
    const double uni = static_cast<double>(mask_area(mask_union(blob, back)));
    EXPECT_GE(inter / uni, 0.99) << "case " << i;
  }
}

TEST(MaskToPolygons, HoleFreeNoiseMasksRoundTripExactly) {
  // Any component, however ragged, is reproduced exactly once holes are
  // filled; compare against the mask with its holes closed by flood fill.
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const BinaryMask m = random_mask(rng, 25, 20, 0.55);
    const BinaryMask back = rasterize_polygons(mask_to_polygons(m), 25, 20);
    // Every original pixel is covered; extra pixels are enclosed holes,
    // i.e. not reachable from the border through 4-connected background.
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 25; ++x)
        if (m.at(x, y)) ASSERT_TRUE(back.at(x, y));
    BinaryMask outside(25, 20);
    std::vector<std::pair<int, int>> st;
    for (int x = 0; x < 25; ++x) st.insert(st.end(), {{x, 0}, {x, 19}});
    for (int y = 0; y < 20; ++y) st.insert(st.end(), {{0, y}, {24, y}});
    while (!st.empty()) {
      auto [x, y] = st.back();
      st.pop_back();
      if (x < 0 || y < 0 || x >= 25 || y >= 20 || m.at(x, y) || outside.at(x, y)) continue;
      outside.set(x, y);
      st.insert(st.end(), {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}});
    }
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 25; ++x)
        if (outside.at(x, y)) ASSERT_FALSE(back.at(x, y)) << i << " @" << x << "," << y;
  }
}

// ---------------------------------------------------------------- morphology

// Set-based oracle: erosion/dilation by explicit Minkowski operations.
std::set<std::pair<int, int>> disc(int r) {
  std::set<std::pair<int, int>> s;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r * (r + 1)) s.insert({dx, dy});
  return s;
}

BinaryMask oracle_open(const BinaryMask& m, int r) {
  const auto se = disc(r);
  BinaryMask eroded(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (auto [dx, dy] : se) {
        const int sx = x + dx, sy = y + dy;
        all = all && sx >= 0 && sy >= 0 && sx < m.width() && sy < m.height() && m.at(sx, sy);
      }
      eroded.set(x, y, all);
    }
  }
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (eroded.at(x, y))
        for (auto [dx, dy] : se) {
          const int sx = x + dx, sy = y + dy;
          if (sx >= 0 && sy >= 0 && sx < m.width() && sy < m.height()) out.set(sx, sy);
        }
  return out;
}

TEST(MorphologicalOpen, RadiusZeroIsIdentity) {
  Rng rng(1);
  const BinaryMask m = random_mask(rng, 20, 20, 0.5);
  EXPECT_EQ(morphological_open(m, 0), m);
}

TEST(MorphologicalOpen, RemovesIsolatedPixel) {
  BinaryMask m(9, 9);
  m.set(4, 4);
  EXPECT_EQ(mask_area(morphological_open(m, 1)), 0u);
}

TEST(MorphologicalOpen, SolidSquareUnchanged) {
  const BinaryMask sq = box_mask(16, 16, {3, 3, 10, 10});
  EXPECT_EQ(oracle_open(sq, 1), sq);
  EXPECT_EQ(morphological_open(sq, 1), sq);
  // Square filling the whole frame as well.
  const BinaryMask full(10, 10, true);
  EXPECT_EQ(morphological_open(full, 1), full);
}

TEST(MorphologicalOpen, MatchesSetOracle) {
  Rng rng(8);
  for (int i = 0; i < 40; ++i) {
    const int r = static_cast<int>(rng.uniform_int(1, 3));
    const BinaryMask m = random_mask(rng, 23, 19, rng.uniform(0.5, 0.95));
    EXPECT_EQ(morphological_open(m, r), oracle_open(m, r)) << "r=" << r;
  }
}

TEST(MorphologicalOpen, IdempotentProperty) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const int r = static_cast<int>(rng.uniform_int(0, 4));
    const BinaryMask m = random_mask(rng, 30, 25, rng.uniform(0.3, 0.95));
    const BinaryMask once = morphological_open(m, r);
    EXPECT_EQ(morphological_open(once, r), once);
  }
}

TEST(MorphologicalOpen, NegativeRadiusThrows) {
  EXPECT_THROW(morphological_open(BinaryMask(3, 3), -1), Error);
}

// ---------------------------------------------------------------- components

TEST(ConnectedComponents, Empty) {
  EXPECT_TRUE(connected_components(BinaryMask(5, 5)).components.empty());
}

TEST(ConnectedComponents, DiagonalTouchIsOneComponent) {
  BinaryMask m(4, 4);
  m.set(1, 1);
  m.set(2, 2);
  const auto cc = connected_components(m);
  ASSERT_EQ(cc.components.size(), 1u);
  EXPECT_EQ(cc.components[0].area, 2u);
  EXPECT_EQ(cc.components[0].box, (Box{1, 1, 2, 2}));
}

TEST(ConnectedComponents, ClearRowSeparatesBlobs) {
  BinaryMask m = box_mask(10, 10, {0, 0, 10, 3});
  m = mask_union(m, box_mask(10, 10, {2, 4, 5, 4}));
  const auto cc = connected_components(m);
  ASSERT_EQ(cc.components.size(), 2u);
  EXPECT_EQ(cc.components[0].id, 1);
  EXPECT_EQ(cc.components[0].area, 30u);
  EXPECT_EQ(cc.components[1].id, 2);
  EXPECT_EQ(cc.components[1].area, 20u);
  EXPECT_EQ(cc.at(3, 5), 2);
  EXPECT_EQ(mask_area(cc.mask_of(2)), 20u);
}

TEST(ConnectedComponents, IdsFollowRasterOrderOfFirstPixel) {
  BinaryMask m(8, 8);
  m.set(6, 1);  // first in raster order
  m.set(1, 3);
  m.set(1, 4);
  const auto cc = connected_components(m);
  ASSERT_EQ(cc.components.size(), 2u);
  EXPECT_EQ(cc.at(6, 1), 1);
  EXPECT_EQ(cc.at(1, 4), 2);
}

}  // namespace
}  // namespace ccc
