#include "chm/existence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chm/error.hpp"

namespace chm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Bisection down to a small bracket, then Newton safeguarded by the bracket.
// f(lo) and f(hi) must have opposite signs.
template <class F, class DF>
double bracketed_root(F&& f, DF&& df, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorKind::RootBracketFailure, "endpoints do not bracket a root");
  }
  const double width0 = std::abs(hi - lo);
  while (std::abs(hi - lo) > 1e-3 * width0) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
    const double a = std::min(lo, hi);
    const double b = std::max(lo, hi);
    if (!(next > a && next < b)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 4.0 * kEps * std::max(std::abs(x), 1e-300) || std::abs(hi - lo) <= 4.0 * kEps * std::abs(x)) {
      break;
    }
  }
  return x;
}

}  // namespace

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::Interior: return "Interior";
    case Region::Boundary: return "Boundary";
    case Region::Outside: return "Outside";
  }
  return "Unknown";
}

double potential(double phi, double a, double c) {
  const double gap = c - phi;
  if (std::abs(gap) <= 64.0 * kEps * std::max(std::abs(c), 1.0)) {
    throw Error(ErrorKind::PoleError, "phi coincides with the pole at c");
  }
  return -0.5 * phi * phi + a / gap;
}

double potential_derivative(double phi, double a, double c) {
  const double gap = c - phi;
  if (std::abs(gap) <= 64.0 * kEps * std::max(std::abs(c), 1.0)) {
    throw Error(ErrorKind::PoleError, "phi coincides with the pole at c");
  }
  return -phi + a / (gap * gap);
}

PotentialShape critical_points(double a, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::NoCriticalPoints, "wave speed must be positive");
  const double amax = a_max(c);
  if (!(a > 0.0) || a > amax) {
    throw Error(ErrorKind::NoCriticalPoints, "a must lie in (0, 4c^3/27]");
  }
  const double third = c / 3.0;
  // g(phi) = phi (c - phi)^2 - a rises on (0, c/3), falls on (c/3, c).
  auto g = [&](double x) { return x * (c - x) * (c - x) - a; };
  auto dg = [&](double x) { return (c - x) * (c - 3.0 * x); };
  PotentialShape s;
  if (amax - a <= 8.0 * kEps * amax) {
    s.phi1 = s.phi2 = third;
  } else {
    s.phi1 = bracketed_root(g, dg, 0.0, third);
    s.phi2 = bracketed_root(g, dg, third, c);
  }
  s.V1 = potential(s.phi1, a, c);
  s.V2 = potential(s.phi2, a, c);
  return s;
}

Region region_membership(const WaveParams& p, double margin) {
  const double c = p.c;
  if (!(c > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.E)) return Region::Outside;
  const double amax = a_max(c);
  const double da = margin * amax;
  const double dE = margin * c * c;
  if (p.a < -da || p.a > amax + da) return Region::Outside;

  if (p.a <= da) {
    // a -> 0: the admissible E-interval tends to (-c^2/2, 0).
    return (p.E >= -0.5 * c * c - dE && p.E <= dE) ? Region::Boundary : Region::Outside;
  }
  if (p.a >= amax - da) {
    return (std::abs(p.E - c * c / 6.0) <= dE + 1e-6 * c * c) ? Region::Boundary : Region::Outside;
  }
  const PotentialShape s = critical_points(p.a, c);
  if (std::abs(p.E - s.V1) <= dE || std::abs(p.E - s.V2) <= dE) return Region::Boundary;
  if (p.E > s.V2 && p.E < s.V1) return Region::Interior;
  return Region::Outside;
}

TurningPoints turning_points(const WaveParams& p) {
  if (region_membership(p) != Region::Interior) {
    throw Error(ErrorKind::NotInRegion, "turning points require an interior (a, E, c)");
  }
  const double a = p.a;
  const double c = p.c;
  const double E = p.E;
  const PotentialShape s = critical_points(a, c);

  auto f = [&](double x) { return E - potential(x, a, c); };
  auto df = [&](double x) { return -potential_derivative(x, a, c); };

  TurningPoints tp;
  tp.phi_min = bracketed_root(f, df, s.phi1, s.phi2);
  // E - V -> -infinity at the pole; this point already lies past the outer root.
  double hi = c - 0.5 * a / (std::abs(E) + 0.5 * c * c + 1.0);
  while (f(hi) > 0.0) hi = 0.5 * (hi + c);
  tp.phi_max = bracketed_root(f, df, s.phi2, hi);
  tp.near_singular = (c - tp.phi_max) < 1e-6 * c;
  tp.near_solitary = (tp.phi_min - s.phi1) < 1e-6 * c;
  return tp;
}

WaveParams Orbit::params() const {
  const double m = mid;
  const double rho2 = rho();
  WaveParams p;
  p.c = c;
  p.a = m * ((c - m) * (c - m) - rho2);
  p.E = 0.5 * (-3.0 * m * m + 2.0 * m * c - rho2);
  return p;
}

bool Orbit::admissible() const {
  return c > 0.0 && half_width >= 0.0 && half_width < 3.0 * mid - c && mid + half_width < c;
}

double Orbit::boundary_distance() const {
  return std::min(3.0 * mid - c - half_width, c - mid - half_width) / c;
}

Orbit orbit_from_turning_points(double phi_min, double phi_max, double c) {
  Orbit o;
  o.mid = 0.5 * (phi_min + phi_max);
  o.half_width = 0.5 * (phi_max - phi_min);
  o.c = c;
  return o;
}

Orbit orbit_of(const WaveParams& p) {
  const TurningPoints tp = turning_points(p);
  return orbit_from_turning_points(tp.phi_min, tp.phi_max, p.c);
}

Orbit OrbitCoords::orbit() const {
  Orbit o;
  o.mid = m;
  o.half_width = std::sqrt(std::max(rho, 0.0));
  o.c = c;
  return o;
}

std::array<std::array<double, 3>, 3> params_jacobian(const OrbitCoords& y) {
  const double m = y.m;
  const double c = y.c;
  const double rho = y.rho;
  std::array<std::array<double, 3>, 3> d{};
  // a = m((c - m)^2 - rho)
  d[0] = {(c - m) * (c - m) - rho - 2.0 * m * (c - m), -m, 2.0 * m * (c - m)};
  // E = (-3m^2 + 2mc - rho)/2
  d[1] = {c - 3.0 * m, -0.5, m};
  d[2] = {0.0, 0.0, 1.0};
  return d;
}

}  // namespace chm
