#pragma once

#include <cmath>
#include <numbers>

namespace ftrack {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to [-pi, pi).
inline double wrap_angle(double a) {
  double w = a - kTwoPi * std::floor((a + kPi) / kTwoPi);
  // floor rounding can land exactly on +pi
  if (w >= kPi) w -= kTwoPi;
  return w;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Circular mean of a set of angles, result in [-pi, pi).
/// Returns 0 for an empty range or a degenerate (sum ~ 0) vector sum.
template <typename It>
double circular_mean(It first, It last) {
  double s = 0.0, c = 0.0;
  for (It it = first; it != last; ++it) {
    s += std::sin(*it);
    c += std::cos(*it);
  }
  if (s == 0.0 && c == 0.0) return 0.0;
  return wrap_angle(std::atan2(s, c));
}

}  // namespace ftrack
