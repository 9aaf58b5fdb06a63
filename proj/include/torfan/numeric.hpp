#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "torfan/error.hpp"

namespace torfan {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(const Int& a, const Int& b) {
  return boost::multiprecision::gcd(a, b);
}

// g = gcd(a, b) >= 0 with a*x + b*y = g.
inline void xgcd(Int a, Int b, Int& g, Int& x, Int& y) {
  Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Int q = a / b;
    Int r = a - q * b;
    a = b;
    b = r;
    Int nx = x0 - q * x1;
    Int ny = y0 - q * y1;
    x0 = x1;
    y0 = y1;
    x1 = nx;
    y1 = ny;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  g = a;
  x = x0;
  y = y0;
}

inline Int pow_int(const Int& base, int e) {
  if (e < 0) throw DomainError("pow_int: negative exponent");
  Int r = 1, b = base;
  int k = e;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

}  // namespace torfan
