#pragma once

// Effective potential, the admissible parameter region and turning points of
// smooth periodic orbits phi < c of the travelling-wave profile equation.

#include <array>
#include <string_view>

namespace chm {

/// Travelling-wave parameters: integration constants (a, E) and speed c.
struct WaveParams {
  double a = 0.0;
  double E = 0.0;
  double c = 0.0;
};

/// Critical points of V(.; a, c): local maximum phi1 <= c/3 <= phi2 local minimum.
struct PotentialShape {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
};

struct TurningPoints {
  double phi_min = 0.0;
  double phi_max = 0.0;
  /// c - phi_max < 1e-6 c: quadrature accuracy degrades as the wave steepens.
  bool near_singular = false;
  /// phi_min - phi1 < 1e-6 c: the orbit is close to the homoclinic loop.
  bool near_solitary = false;
};

enum class Region { Interior, Boundary, Outside };

std::string_view to_string(Region r) noexcept;

inline constexpr double kDefaultBoundaryMargin = 1e-9;

/// V(phi; a, c) = -phi^2/2 + a/(c - phi). Throws PoleError at the pole.
double potential(double phi, double a, double c);

/// V'(phi; a, c) = -phi + a/(c - phi)^2.
double potential_derivative(double phi, double a, double c);

/// Upper end of the admissible a-interval, 4c^3/27.
inline double a_max(double c) { return 4.0 * c * c * c / 27.0; }

/// Roots of a = phi (c - phi)^2 on (0, c/3] and [c/3, c). Throws NoCriticalPoints
/// unless 0 < a <= 4c^3/27.
PotentialShape critical_points(double a, double c);

Region region_membership(const WaveParams& p, double margin = kDefaultBoundaryMargin);

/// Minimum and maximum roots of E - V(.; a, c). Requires an Interior point.
TurningPoints turning_points(const WaveParams& p);

/// A periodic orbit described by its turning points and speed. Every quadrature
/// in the library is written in terms of these three numbers; the cubic
/// (c - phi)(E - V) has roots phi_min, phi_max and third_root() = c - phi_min - phi_max.
struct Orbit {
  double mid = 0.0;        ///< (phi_min + phi_max)/2
  double half_width = 0.0; ///< (phi_max - phi_min)/2 >= 0
  double c = 0.0;

  double phi_min() const { return mid - half_width; }
  double phi_max() const { return mid + half_width; }
  double third_root() const { return c - 2.0 * mid; }
  double rho() const { return half_width * half_width; }

  /// (a, E, c) recovered exactly from the roots of the cubic.
  WaveParams params() const;

  /// True when third_root < phi_min <= phi_max < c, i.e. the orbit is a smooth
  /// periodic (or constant, for half_width = 0) solution below the pole.
  bool admissible() const;

  /// Smallest relative distance to the solitary (third_root = phi_min) and
  /// peaked (phi_max = c) boundaries, scaled by c.
  double boundary_distance() const;
};

Orbit orbit_from_turning_points(double phi_min, double phi_max, double c);

/// Orbit of an Interior parameter point (runs turning_points).
Orbit orbit_of(const WaveParams& p);

/// Internal smooth chart (m, rho = r^2, c) of the orbit family; analytic through
/// the constant-state boundary rho = 0.
struct OrbitCoords {
  double m = 0.0;
  double rho = 0.0;
  double c = 0.0;

  Orbit orbit() const;
  std::array<double, 3> as_array() const { return {m, rho, c}; }
  static OrbitCoords from_array(const std::array<double, 3>& y) { return {y[0], y[1], y[2]}; }
  static OrbitCoords of(const Orbit& o) { return {o.mid, o.rho(), o.c}; }
};

/// d(a, E, c)/d(m, rho, c), row-major.
std::array<std::array<double, 3>, 3> params_jacobian(const OrbitCoords& y);

}  // namespace chm
