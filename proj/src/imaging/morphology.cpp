#include "ccc/imaging/morphology.hpp"

#include "ccc/error.hpp"
#include "ccc/kernels/kernels.hpp"

namespace ccc {

namespace {

void check_radius(int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "morphology radius must be >= 0");
}

}  // namespace

BinaryMask erode(const BinaryMask& m, int radius) {
  check_radius(radius);
  return kernels::parallel::erode(m, radius);
}

BinaryMask dilate(const BinaryMask& m, int radius) {
  check_radius(radius);
  return kernels::parallel::dilate(m, radius);
}

BinaryMask morphological_open(const BinaryMask& m, int radius) {
  check_radius(radius);
  if (radius == 0) return m;
  return kernels::parallel::dilate(kernels::parallel::erode(m, radius), radius);
}

}  // namespace ccc
