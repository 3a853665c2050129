#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isoflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Counterclockwise rotation by pi/2 (the operator J of planar geometry).
inline Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

inline Vec2 unit_dir(double angle) { return Vec2(std::cos(angle), std::sin(angle)); }

inline double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }

/// Wraps to [0, 2*pi).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

/// Wraps to (-pi, pi].
inline double wrap_pi(double a) {
  double r = wrap_two_pi(a);
  return r > kPi ? r - kTwoPi : r;
}

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

/// Raised on invalid user-facing input (bad bodies, malformed configs, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an algorithm cannot meet its numerical contract.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isoflow
