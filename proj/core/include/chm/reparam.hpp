#pragma once

// The chart (a, E, c) <-> (k, M, P). Throughout, M and P denote period means
// <phi> and <(phi^2 + k^2 phi'^2)/2> over theta in [0, 1), the densities whose
// balance laws make up the Whitham system.

#include <array>
#include <vector>

#include "chm/existence.hpp"
#include "chm/quadrature.hpp"

namespace chm {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

struct Chart {
  WaveParams at;
  Orbit orbit;
  Vec3 kmp{};  ///< (k, M, P)
  Mat3 J{};    ///< d(k, M, P)/d(a, E, c)
  Mat3 Jinv{}; ///< d(a, E, c)/d(k, M, P)
  Vec3 c_partials{};  ///< (c_k, c_M, c_P)
  Vec3 E_partials{};
  Vec3 a_partials{};
  double det_J = 0.0;
  WaveFunctionals functionals;
};

inline constexpr double kDegenerateChartTol = 1e-10;

/// Chart at an interior point. Derivatives come from orbit_gradients.
/// Throws DegenerateChart when |det J| < 1e-10 ||J||_F^3.
Chart chart(const WaveParams& p, int nodes = kDefaultNodes);
Chart orbit_chart(const Orbit& o, int nodes = kDefaultNodes);

Vec3 to_kmp(const WaveParams& p, int nodes = kDefaultNodes);
Vec3 orbit_kmp(const Orbit& o, int nodes = kDefaultNodes);

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;  ///< max_i |kmp_i - target_i| / max(|target_i|, 1e-300)
};

/// Newton iteration for the wave with the given (k, M, P). The iteration runs
/// in orbit coordinates (m, rho, c) and is damped to stay admissible.
/// Throws NewtonDivergence unless the relative residual falls below 1e-10.
Orbit orbit_from_kmp(const Vec3& kmp, const Orbit& guess, NewtonReport* report = nullptr,
                     int nodes = kDefaultNodes);
WaveParams from_kmp(const Vec3& kmp, const WaveParams& guess, NewtonReport* report = nullptr,
                    int nodes = kDefaultNodes);

/// Finite-difference steps along the (k, M, P) coordinate lines. The M and P
/// steps are capped so that P - M^2/2, which vanishes for constant states,
/// changes by at most 5%.
Vec3 kmp_steps(const Vec3& kmp, double step);

/// Profile tangents along the (k, M, P) coordinate lines on the grid of the
/// base profile, with the phase pinned by phi(0) = phi_max.
struct ProfilePartials {
  std::vector<double> phi_k;
  std::vector<double> phi_M;
  std::vector<double> phi_P;
};

enum class PartialsMethod { LinearSolve, FiniteDifference };

/// LinearSolve solves L0 phi_x = rhs_x in Fourier space with modes -N..N,
/// bordered by the translation mode phi'. FiniteDifference regenerates
/// profiles through orbit_from_kmp with a Richardson step.
ProfilePartials profile_partials(const WaveProfile& w, const Chart& ch,
                                 PartialsMethod method = PartialsMethod::LinearSolve,
                                 int N = 0, double step = 1e-4);

}  // namespace chm
