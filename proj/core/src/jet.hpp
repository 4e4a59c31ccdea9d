#pragma once

// Forward-mode derivatives in three directions. Used to differentiate the orbit
// quadratures with respect to (m, r, c) without finite differences.

#include <array>
#include <cmath>

namespace chm::detail {

struct Jet {
  double v = 0.0;
  std::array<double, 3> d{0.0, 0.0, 0.0};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
  static Jet variable(double value, int i) {
    Jet j(value);
    j.d[static_cast<std::size_t>(i)] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < 3; ++i) d[i] += o.d[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < 3; ++i) d[i] -= o.d[i];
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    for (int i = 0; i < 3; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    const double inv = 1.0 / o.v;
    for (int i = 0; i < 3; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator-(Jet a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}

inline Jet sqrt(const Jet& a) {
  Jet r(std::sqrt(a.v));
  const double h = 0.5 / r.v;
  for (int i = 0; i < 3; ++i) r.d[i] = h * a.d[i];
  return r;
}

}  // namespace chm::detail
