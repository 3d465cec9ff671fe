#pragma once

#include <cmath>
#include <numbers>

namespace trustmhe {

// Wraps an angle to [-pi, pi). remainder() lands in [-pi, +pi]; the single
// excluded endpoint +pi is mapped to -pi so the interval is half-open.
inline double wrap_angle(double theta) {
  double r = std::remainder(theta, 2.0 * std::numbers::pi);
  if (r == std::numbers::pi) r = -std::numbers::pi;
  return r;
}

// Smallest signed difference a - b on the circle, in [-pi, pi).
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

}  // namespace trustmhe
