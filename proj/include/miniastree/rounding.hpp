#pragma once

// Directed rounding on top of round-to-nearest arithmetic.
//
// Every helper returns a double that is a sound bound of the exact real
// result: *_up never underestimates and *_down never overestimates. The
// exactness test uses error-free transformations (TwoSum, fma residuals), so
// the result is off by at most one ulp and is exact whenever the
// round-to-nearest result already was.

#include <cmath>
#include <limits>

namespace miniastree::rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMax = std::numeric_limits<double>::max();
inline constexpr double kDenormMin = std::numeric_limits<double>::denorm_min();
// Below this magnitude fma residuals may themselves underflow.
inline constexpr double kTiny = 0x1p-969;

inline double next_up(double x) { return std::nextafter(x, kInf); }
inline double next_down(double x) { return std::nextafter(x, -kInf); }

inline double add_up(double a, double b) {
  double s = a + b;
  if (std::isnan(s)) return s;
  if (std::isinf(s)) {
    if (std::isinf(a) || std::isinf(b)) return s;
    return s > 0 ? s : -kMax;
  }
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return err > 0 ? next_up(s) : s;
}

inline double add_down(double a, double b) { return -add_up(-a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }
inline double sub_down(double a, double b) { return add_down(a, -b); }

// 0 * inf is taken as 0: interval bounds never multiply an actual infinity by
// an actual zero.
inline double mul_up(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  double p = a * b;
  if (std::isnan(p)) return p;
  if (std::isinf(p)) {
    if (std::isinf(a) || std::isinf(b)) return p;
    return p > 0 ? p : -kMax;
  }
  if (std::fabs(p) < kTiny) return next_up(p);
  double err = std::fma(a, b, -p);
  return err > 0 ? next_up(p) : p;
}

inline double mul_down(double a, double b) { return -mul_up(-a, b); }

inline double div_up(double a, double b) {
  if (a == 0) return 0.0;
  double q = a / b;
  if (std::isnan(q)) return q;
  if (std::isinf(q)) {
    if (std::isinf(a) || b == 0) return q;
    return q > 0 ? q : -kMax;
  }
  if (std::isinf(b)) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
  // a - q*b has the sign of (exact - q) * b.
  double r = std::fma(-q, b, a);
  bool exact_above = (r > 0 && b > 0) || (r < 0 && b < 0);
  return exact_above ? next_up(q) : q;
}

inline double div_down(double a, double b) { return -div_up(-a, b); }

inline double sqrt_up(double x) {
  if (x <= 0) return 0.0;
  double s = std::sqrt(x);
  if (std::isinf(s)) return s;
  if (x < kTiny) return next_up(s);
  double r = std::fma(s, s, -x);
  return r < 0 ? next_up(s) : s;
}

inline double sqrt_down(double x) {
  if (x <= 0) return 0.0;
  double s = std::sqrt(x);
  if (std::isinf(s)) return s;
  if (x < kTiny) return next_down(s) > 0 ? next_down(s) : 0.0;
  double r = std::fma(s, s, -x);
  return r > 0 ? next_down(s) : s;
}

// Smallest / largest double bound of x*x.
inline double sq_up(double x) { return mul_up(x, x); }
inline double sq_down(double x) { return mul_down(x, x) < 0 ? 0.0 : mul_down(x, x); }

// Half of a DBM bound; exact except in the subnormal range.
inline double half_up(double x) {
  double h = x / 2;
  if (std::isinf(x) || h * 2 == x) return h;
  return next_up(h);
}

}  // namespace miniastree::rounding
