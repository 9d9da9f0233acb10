#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace mcopt {

/// Seeded random source with platform-independent derived distributions.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the standard.
/// The standard distributions are not, so uniform/normal/index draws are computed
/// here directly to keep traces identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased uniform index in [0, n). Requires n > 0.
  std::size_t index(std::size_t n);
  /// Standard normal via Box-Muller.
  double normal();

  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// FNV-1a 64-bit hash; stable across runs and platforms.
std::uint64_t stable_hash(std::string_view text) noexcept;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines a base seed with coordinates into an independent child seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept;

}  // namespace mcopt
