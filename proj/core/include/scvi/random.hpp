#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace scvi {

std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic child seed for (master, a, b); distinct tuples give
// statistically independent mt19937_64 streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

enum class Substream : std::uint64_t {
  Initial = 1,
  Block = 2,
  ExtraNoise = 3,
  MainNoise = 4,
  Generator = 5,
  Sampling = 6,
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master, Substream which, std::uint64_t index = 0)
      : engine_(derive_seed(master, static_cast<std::uint64_t>(which), index)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace scvi
