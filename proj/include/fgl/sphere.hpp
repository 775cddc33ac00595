#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace fgl {

using Complex = std::complex<double>;
using IntVec = std::vector<int>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

/// A point of the Riemann sphere: a finite complex number or infinity.
class SpherePoint {
 public:
  constexpr SpherePoint(Complex z) : z_(z) {}  // NOLINT(google-explicit-constructor)
  constexpr SpherePoint(double x) : z_(x, 0.0) {}  // NOLINT(google-explicit-constructor)

  static constexpr SpherePoint infinity() {
    SpherePoint p{Complex{}};
    p.infinite_ = true;
    return p;
  }

  constexpr bool is_infinite() const { return infinite_; }
  /// The finite value; meaningless when is_infinite().
  constexpr Complex value() const { return z_; }

  friend constexpr bool operator==(const SpherePoint& a, const SpherePoint& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.z_ == b.z_);
  }

 private:
  Complex z_;
  bool infinite_ = false;
};

/// z^n for integer n by repeated squaring; std::pow on complex goes through
/// exp/log and loses exactness on values like -1.
inline Complex ipow(Complex base, int n) {
  if (n < 0) return Complex(1.0) / ipow(base, -n);
  Complex result(1.0);
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

inline int coordinate_sum(const IntVec& n) {
  int s = 0;
  for (int v : n) s += v;
  return s;
}

inline int l1_norm(const IntVec& n) {
  int s = 0;
  for (int v : n) s += v < 0 ? -v : v;
  return s;
}

}  // namespace fgl
