#include "ccc/imaging/raster.hpp"

#include <array>

#include "ccc/error.hpp"
#include "ccc/imaging/components.hpp"
#include "ccc/kernels/kernels.hpp"

namespace ccc {

BinaryMask rasterize_polygon(const Polygon& poly, int width, int height) {
  if (poly.vertices.size() < 3) {
    throw Error(ErrorCode::DegeneratePolygon,
                "polygon needs at least 3 vertices, got " +
                    std::to_string(poly.vertices.size()));
  }
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "raster dimensions must be >= 1");
  }
  std::vector<Point2> px;
  px.reserve(poly.vertices.size());
  for (const auto& v : poly.vertices) {
    if (!(v.x >= 0.0 && v.x <= 1.0 && v.y >= 0.0 && v.y <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "polygon coordinate outside [0,1]");
    }
    px.push_back({v.x * width, v.y * height});
  }
  return kernels::parallel::rasterize(px, width, height);
}

BinaryMask rasterize_polygons(std::span<const Polygon> polys, int width, int height) {
  BinaryMask out(width, height);
  for (const auto& p : polys) out = kernels::parallel::bit_or(out, rasterize_polygon(p, width, height));
  return out;
}

namespace {

// Headings in image coordinates (y grows downwards): E, S, W, N.
constexpr std::array<int, 4> kDx{1, 0, -1, 0};
constexpr std::array<int, 4> kDy{0, 1, 0, -1};

// Crack-following trace with the component on the right-hand side. At each
// corner the candidates are tried left, straight, right; trying left first
// keeps diagonal neighbours inside the contour (8-connectivity).
std::vector<std::pair<int, int>> trace_outer(const ComponentLabels& cc, int id, int sx, int sy) {
  auto inside = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < cc.width && y < cc.height && cc.at(x, y) == id;
  };
  // Pixel in the quadrant of corner (X,Y) spanned by headings a and b.
  auto quad = [&](int X, int Y, int a, int b) {
    const int qx = kDx[a] + kDx[b];
    const int qy = kDy[a] + kDy[b];
    return inside(X + (qx - 1) / 2, Y + (qy - 1) / 2);
  };

  std::vector<std::pair<int, int>> corners;
  int X = sx, Y = sy, dir = 0;
  corners.emplace_back(X, Y);
  while (true) {
    X += kDx[dir];
    Y += kDy[dir];
    const int left = (dir + 3) % 4;
    const int right = (dir + 1) % 4;
    int next;
    if (quad(X, Y, dir, left)) {
      next = left;
    } else if (quad(X, Y, dir, right)) {
      next = dir;
    } else {
      next = right;
    }
    if (X == sx && Y == sy && next == 0) break;
    if (next != dir) corners.emplace_back(X, Y);
    dir = next;
  }
  return corners;
}

}  // namespace

std::vector<Polygon> mask_to_polygons(const BinaryMask& m) {
  const ComponentLabels cc = connected_components(m);
  std::vector<Polygon> out;
  out.reserve(cc.components.size());
  // The first pixel in raster order of each component is its top-left-most
  // pixel; its top edge is always on the outer boundary.
  std::vector<bool> seen(cc.components.size() + 1, false);
  for (int y = 0; y < cc.height; ++y) {
    for (int x = 0; x < cc.width; ++x) {
      const int id = cc.at(x, y);
      if (id == 0 || seen[static_cast<std::size_t>(id)]) continue;
      seen[static_cast<std::size_t>(id)] = true;
      Polygon poly;
      for (const auto& [cx, cy] : trace_outer(cc, id, x, y)) {
        poly.vertices.push_back({static_cast<double>(cx) / cc.width,
                                 static_cast<double>(cy) / cc.height});
      }
      out.push_back(std::move(poly));
    }
  }
  return out;
}

}  // namespace ccc
