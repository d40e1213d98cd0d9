#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace acfb {

inline constexpr int kMaxAxes = 3;       // spatial dimension cap
inline constexpr int kMaxComponents = 4; // codomain dimension cap

using Index = std::int64_t;

// Physical point; axes beyond n are zero.
using Point = std::array<double, kMaxAxes>;

// Codomain value; components beyond m are zero.
using Comp = std::array<double, kMaxComponents>;

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

}  // namespace acfb
