#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ccc {

struct Rgb {
  std::uint8_t r{};
  std::uint8_t g{};
  std::uint8_t b{};

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Padding colour used throughout standardization.
inline constexpr Rgb kPadGray{173, 173, 173};

/// Row-major 8-bit RGB image. Width and height are always >= 1.
class ImageRGB {
 public:
  ImageRGB() = default;
  ImageRGB(int width, int height, Rgb fill = {});
  /// Takes ownership of interleaved R,G,B bytes; size must equal 3*w*h.
  ImageRGB(int width, int height, std::vector<std::uint8_t> interleaved);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return pixel_count() == 0; }

  Rgb at(int x, int y) const noexcept {
    const std::size_t i = index(x, y) * 3;
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb p) noexcept {
    const std::size_t i = index(x, y) * 3;
    data_[i] = p.r;
    data_[i + 1] = p.g;
    data_[i + 2] = p.b;
  }

  std::span<const std::uint8_t> bytes() const noexcept { return data_; }
  std::span<std::uint8_t> bytes() noexcept { return data_; }

  friend bool operator==(const ImageRGB&, const ImageRGB&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_{0};
  int height_{0};
  std::vector<std::uint8_t> data_;
};

/// Axis-aligned pixel box; covers columns [x, x+w) and rows [y, y+h).
struct Box {
  int x{0};
  int y{0};
  int w{0};
  int h{0};

  long long area() const noexcept { return static_cast<long long>(w) * h; }
  friend bool operator==(const Box&, const Box&) = default;
};

/// One byte per pixel, 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) noexcept { bits_[index(x, y)] = v ? 1 : 0; }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> bits() noexcept { return bits_; }

  bool same_shape(const BinaryMask& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_{0};
  int height_{0};
  std::vector<std::uint8_t> bits_;
};

struct Point2 {
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Closed polygon in normalized image coordinates ([0,1] on both axes).
/// Self-intersection is allowed; fills use the even-odd rule.
struct Polygon {
  std::vector<Point2> vertices;
};

}  // namespace ccc
