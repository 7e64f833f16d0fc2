#pragma once

#include <cstdint>

namespace gpool {

// Counter-based generator built on SplitMix64. The output stream is a pure
// function of the seed and the call index, so results are identical across
// platforms and compilers; std::random distributions are avoided on purpose
// because their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Derived stream for a sub-task; distinct tags give independent streams and
  // the parent state is left untouched.
  Rng fork(std::uint64_t tag) const {
    std::uint64_t z = state_ ^ 0xd6e8feb86659fd93ULL;
    z = (z ^ (z >> 32)) * 0xd6e8feb86659fd93ULL;
    z += tag * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    z = (z ^ (z >> 32)) * 0xd6e8feb86659fd93ULL;
    return Rng(z ^ (z >> 32));
  }

 private:
  std::uint64_t state_;
};

}  // namespace gpool
