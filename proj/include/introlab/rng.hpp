#pragma once

#include <cstdint>

namespace introlab {

// Counter-based generator: output i of stream (seed, stream) is a pure
// function of (seed, stream, i), so every sample is reproducible from the
// seed and the call index, independent of platform or library version.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream), counter_(0) {}

  uint64_t next_u64() {
    uint64_t x = seed_;
    x ^= 0x9e3779b97f4a7c15ull * (stream_ + 1);
    x += 0xbf58476d1ce4e5b9ull * ++counter_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // Unbiased sample from [0, n) by rejection.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t rem = UINT64_MAX % n;
    uint64_t limit = UINT64_MAX - rem;
    for (;;) {
      uint64_t x = next_u64();
      if (x < limit || rem == n - 1) return x % n;
    }
  }

  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool coin() { return next_u64() & 1; }

  // Independent stream derived from this generator's identity.
  Rng fork(uint64_t stream) const {
    return Rng(seed_ ^ (0xd1342543de82ef95ull * (stream + 1)), stream_ + 1);
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_;
};

}  // namespace introlab
