#pragma once

#include <cmath>
#include <utility>

namespace gibbsconv {

/// Reduce a real number into [0, 1).
inline double reduce_unit(double x) noexcept {
  const double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1
  return r >= 1.0 ? 0.0 : r;
}

/// A point of the circle R/Z, stored as its representative in [0, 1).
class CirclePoint {
 public:
  constexpr CirclePoint() noexcept = default;
  explicit CirclePoint(double x) noexcept : value_(reduce_unit(x)) {}

  constexpr double value() const noexcept { return value_; }

  friend constexpr bool operator==(CirclePoint, CirclePoint) noexcept = default;

 private:
  double value_ = 0.0;
};

inline CirclePoint circle_add(CirclePoint x, CirclePoint y) noexcept {
  return CirclePoint(x.value() + y.value());
}

inline CirclePoint circle_sub(CirclePoint x, CirclePoint y) noexcept {
  return CirclePoint(x.value() - y.value());
}

/// T(x) = 2x mod 1.
inline CirclePoint doubling_map(CirclePoint x) noexcept {
  return CirclePoint(2.0 * x.value());
}

/// The two T-preimages of y: y/2 and y/2 + 1/2.
inline std::pair<CirclePoint, CirclePoint> preimages(CirclePoint y) noexcept {
  const double half = 0.5 * y.value();
  return {CirclePoint(half), CirclePoint(half + 0.5)};
}

/// Arc-length distance min(|x-y|, 1-|x-y|).
inline double circle_distance(CirclePoint x, CirclePoint y) noexcept {
  const double d = std::fabs(x.value() - y.value());
  return d < 1.0 - d ? d : 1.0 - d;
}

}  // namespace gibbsconv
