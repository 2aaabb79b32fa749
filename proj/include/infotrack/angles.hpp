#pragma once

#include <cmath>
#include <numbers>

namespace infotrack {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_to_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) {
    a += kTwoPi;
  } else if (a > kPi) {
    a -= kTwoPi;
  }
  return a;
}

/// Unnormalized sinc: sin(u)/u with sinc(0) = 1.
inline double sinc(double u) {
  if (u == 0.0) return 1.0;
  return std::sin(u) / u;
}

}  // namespace infotrack
