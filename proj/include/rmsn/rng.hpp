#pragma once

// Portable seeded randomness. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; all distributions are implemented here
// because the standard library ones differ between implementations.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rmsn {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the substream for one entity, e.g. ("client", 3). Streams for
/// different (tag, id) pairs are independent of each other.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t id = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view tag, std::uint64_t id = 0) : engine_(derive_seed(seed, tag, id)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double unit();
  /// Uniform in [lo, hi]; returns lo when the range is a single point.
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi] by rejection sampling.
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  /// Uniform in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(n) - 1)); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rmsn
