#pragma once

#include <cmath>
#include <numbers>

namespace igc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDegToRad = kPi / 180.0;

constexpr double deg2rad(double deg) { return deg * kDegToRad; }
constexpr double rad2deg(double rad) { return rad / kDegToRad; }

/// Principal value in [-pi, pi).
inline double wrap_pi(double angle) {
  double w = std::fmod(angle + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs like -pi - 2pi*k.
  if (w >= kPi) w -= 2.0 * kPi;
  return w;
}

/// An angle as written in a configuration file. The degree value is the
/// source of truth so that a config survives serialize/parse bit-exactly.
struct Degrees {
  double deg = 0.0;

  double rad() const { return deg2rad(deg); }
  friend bool operator==(const Degrees&, const Degrees&) = default;
};

}  // namespace igc
