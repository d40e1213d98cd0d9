#pragma once

#include <cstdint>
#include <random>

namespace acfb {

// mt19937_64 with a manual [0,1) mapping so streams are identical across
// platforms and standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace acfb
