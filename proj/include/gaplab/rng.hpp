#pragma once

#include <cstdint>

#include "gaplab/errors.hpp"

namespace gaplab {

// Counter-based splittable generator (splitmix64 finalizer over key+counter).
// Draw i of a stream depends only on (key, i), and split(id) derives a child
// key from (key, id) alone, so a master seed fans out into per-instance
// streams that reproduce bit-identically no matter how work is scheduled
// across threads.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kSeedSalt)) {}

  // Child stream; independent of this stream's draw position.
  SplitRng split(std::uint64_t stream) const {
    SplitRng child;
    child.key_ = mix(key_ ^ mix(stream + kSplitSalt));
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + ++counter_ * kGamma); }

  // Unbiased draw from [0, bound) via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw InvalidParameterError("next_below bound must be positive");
    const std::uint64_t rem = 0xFFFFFFFFFFFFFFFFull % bound;
    const std::uint64_t limit = 0xFFFFFFFFFFFFFFFFull - rem;  // multiple of bound
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  SplitRng() = default;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kSeedSalt = 0x05CA1AB1E0DDBA11ull;
  static constexpr std::uint64_t kSplitSalt = 0xC0FFEE3141592653ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace gaplab
