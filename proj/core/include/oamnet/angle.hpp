#pragma once

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace oamnet {

inline constexpr double kPi = std::numbers::pi;

/// An angle stored exactly as the rational multiple num/den of pi.
/// Config files and synthesized sorter stages only ever use such angles
/// (pi, pi/2, -3/4 pi, ...), so keeping the rational avoids decimal drift
/// in serialized scenarios and makes stage determinism checks exact.
struct PiAngle {
  long long num = 0;
  long long den = 1;  // always > 0, gcd(num, den) == 1

  static PiAngle of(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("PiAngle: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
    return PiAngle{num, den};
  }

  double radians() const {
    return static_cast<double>(num) / static_cast<double>(den) * kPi;
  }

  bool operator==(const PiAngle&) const = default;
};

/// Reduce an angle to the half-open interval (-pi, pi].
inline double reduce_angle(double phi) {
  double r = std::remainder(phi, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Distance between two angles modulo 2*pi, in [0, pi].
inline double angle_distance(double a, double b) {
  return std::abs(reduce_angle(a - b));
}

}  // namespace oamnet
