#pragma once

#include <cstdint>
#include <random>

namespace delta::battle {

// Seeded stream. Reduction to a range is done here rather than through
// <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    ++draws_;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 gen_;
  std::uint64_t draws_ = 0;
};

}  // namespace delta::battle
