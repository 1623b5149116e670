// Serial reference kernels against their OpenMP counterparts on a 1024x1024
// frame. Run with --benchmark_filter to isolate one kernel.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ccc/kernels/kernels.hpp"
#include "ccc/util.hpp"

namespace {

using namespace ccc;

constexpr int kSide = 1024;

const ImageRGB& frame() {
  static const ImageRGB img = [] {
    ImageRGB out(kSide, kSide);
    Rng rng(7);
    for (auto& b : out.bytes()) b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return out;
  }();
  return img;
}

const BinaryMask& blobs() {
  static const BinaryMask m = [] {
    BinaryMask out(kSide, kSide);
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
      const double cx = rng.uniform(0, kSide), cy = rng.uniform(0, kSide), r = rng.uniform(5, 40);
      for (int y = 0; y < kSide; ++y)
        for (int x = 0; x < kSide; ++x)
          if (std::hypot(x - cx, y - cy) <= r) out.set(x, y);
    }
    return out;
  }();
  return m;
}

const std::vector<Point2>& star() {
  static const std::vector<Point2> v = [] {
    std::vector<Point2> out;
    for (int i = 0; i < 400; ++i) {
      const double t = 2 * M_PI * i / 400, r = (i % 2 ? 0.2 : 0.48) * kSide;
      out.push_back({kSide / 2.0 + r * std::cos(t), kSide / 2.0 + r * std::sin(t)});
    }
    return out;
  }();
  return v;
}

const HsvRange kRange{{50, 100, 140}, {70, 255, 255}};

#define CCC_BENCH_PAIR(name, expr_serial, expr_parallel)                         \
  void BM_##name##_serial(benchmark::State& st) {                                \
    for (auto _ : st) benchmark::DoNotOptimize(expr_serial);                     \
  }                                                                               \
  void BM_##name##_parallel(benchmark::State& st) {                              \
    for (auto _ : st) benchmark::DoNotOptimize(expr_parallel);                   \
  }                                                                               \
  BENCHMARK(BM_##name##_serial)->Unit(benchmark::kMillisecond);                   \
  BENCHMARK(BM_##name##_parallel)->Unit(benchmark::kMillisecond)

CCC_BENCH_PAIR(ThresholdHsv, kernels::serial::threshold_hsv(frame(), kRange),
               kernels::parallel::threshold_hsv(frame(), kRange));
CCC_BENCH_PAIR(Count, kernels::serial::count(blobs()), kernels::parallel::count(blobs()));
CCC_BENCH_PAIR(BitAnd, kernels::serial::bit_and(blobs(), blobs()), kernels::parallel::bit_and(blobs(), blobs()));
CCC_BENCH_PAIR(Erode4, kernels::serial::erode(blobs(), 4), kernels::parallel::erode(blobs(), 4));
CCC_BENCH_PAIR(Dilate4, kernels::serial::dilate(blobs(), 4), kernels::parallel::dilate(blobs(), 4));
CCC_BENCH_PAIR(Rasterize, kernels::serial::rasterize(star(), kSide, kSide),
               kernels::parallel::rasterize(star(), kSide, kSide));
CCC_BENCH_PAIR(Resize224, kernels::serial::resize_bilinear(frame(), 224, 224),
               kernels::parallel::resize_bilinear(frame(), 224, 224));

}  // namespace

// Fixtures are built before timing starts.
int main(int argc, char** argv) {
  (void)frame();
  (void)blobs();
  (void)star();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
