#pragma once

#include <cstdint>

namespace unimod {

// splitmix64: tiny, deterministic, good enough for candidate sampling.
// Randomness here only drives searches whose results are verified exactly.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n)
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  // uniform in [lo, hi] inclusive
  long long range(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

private:
  std::uint64_t state_;
};

} // namespace unimod
