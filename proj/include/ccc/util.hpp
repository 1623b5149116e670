#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace ccc {

/// Seeded generator whose draws are identical on every standard library:
/// only the engine (fully specified by the standard) is used, never the
/// implementation-defined distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_{false};
  double spare_{0.0};
};

/// FNV-1a 64-bit over the bytes of `text`, folded with `salt`.
std::uint64_t stable_hash(std::string_view text, std::uint64_t salt = 0);
std::uint64_t stable_hash_bytes(std::span<const std::uint8_t> bytes, std::uint64_t h);

/// 16 hex chars of FNV-1a over the file's bytes.
std::string file_digest(const std::filesystem::path& path);

/// OpenMP worker count for subsequent parallel regions; 0 restores the
/// runtime default. No-op when built without OpenMP.
void set_num_threads(int n);
int max_threads();

}  // namespace ccc
