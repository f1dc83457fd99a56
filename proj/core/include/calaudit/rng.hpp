#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace calaudit {

/// Seeded pseudo-random source with platform-independent output.
///
/// The standard distributions are implementation-defined, so uniform and
/// bounded draws are derived here from the raw mt19937_64 stream. Given the
/// same seed, every platform sees the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Mixes a master seed with a list of keys (run index, ratio index, attempt,
/// ...) into an independent child seed. Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

}  // namespace calaudit
