#include "ccc/imaging/image.hpp"

#include <string>

#include "ccc/error.hpp"

namespace ccc {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

ImageRGB::ImageRGB(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    data_[3 * i] = fill.r;
    data_[3 * i + 1] = fill.g;
    data_[3 * i + 2] = fill.b;
  }
}

ImageRGB::ImageRGB(int width, int height, std::vector<std::uint8_t> interleaved)
    : width_(width), height_(height), data_(std::move(interleaved)) {
  check_dims(width, height);
  if (data_.size() != pixel_count() * 3) {
    throw Error(ErrorCode::DimensionMismatch, "pixel buffer size does not match 3*w*h");
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(pixel_count(), fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height);
  if (bits_.size() != pixel_count()) {
    throw Error(ErrorCode::DimensionMismatch, "mask buffer size does not match w*h");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

}  // namespace ccc
