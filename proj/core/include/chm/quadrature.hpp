#pragma once

// Period, conserved functionals and sampled profiles of periodic orbits.
//
// Every integral over [phi_min, phi_max] is taken in the variable s of
// phi = mid - half_width * cos(s). The square-root endpoint singularities
// cancel against d phi and the integrands become analytic, even and
// 2 pi-periodic in s, so the midpoint rule on [0, pi] converges geometrically.

#include <array>
#include <complex>
#include <vector>

#include "chm/existence.hpp"

namespace chm {

inline constexpr int kDefaultNodes = 256;
inline constexpr int kDefaultGrid = 256;
inline constexpr double kProfileTolerance = 1e-8;

/// Totals over one period in the unscaled variable eta = x - ct, plus the
/// period means used by the (k, M, P) chart.
struct WaveFunctionals {
  double T = 0.0;
  double k = 0.0;
  double M = 0.0;       ///< int_0^T phi
  double P = 0.0;       ///< (1/2) int_0^T (phi^2 + phi_eta^2)
  double F = 0.0;       ///< (1/2) int_0^T (phi^3 + phi phi_eta^2)
  double action = 0.0;  ///< c P - F - E M
  double M_mean = 0.0;  ///< M / T
  double P_mean = 0.0;  ///< P / T
};

/// Period means of the fluxes -(3/2)phi^2 - (1/2)k^2 phi'^2 and
/// c k^2 phi'^2 - phi^3 + k^2 phi^2 phi''.
struct AveragedFluxes {
  double qM = 0.0;
  double qP = 0.0;
};

double period(const WaveParams& p, int nodes = kDefaultNodes);
WaveFunctionals functionals(const WaveParams& p, int nodes = kDefaultNodes);

double orbit_period(const Orbit& o, int nodes = kDefaultNodes);
WaveFunctionals orbit_functionals(const Orbit& o, int nodes = kDefaultNodes);
AveragedFluxes orbit_fluxes(const Orbit& o, int nodes = kDefaultNodes);

/// A scalar and its gradient with respect to the orbit coordinates (m, rho, c).
struct Graded {
  double value = 0.0;
  std::array<double, 3> grad{};
};

/// Exact (forward-mode) gradients of the orbit quadratures. Requires half_width > 0;
/// for half_width below 1e-7 c the gradient is evaluated at that width.
struct OrbitGradients {
  Graded T, M, P, F, k, M_mean, P_mean, qM, qP, a, E;
};

OrbitGradients orbit_gradients(const Orbit& o, int nodes = kDefaultNodes);

/// Sampled 1-periodic profile phi(theta) with phi(0) = phi_max.
struct WaveProfile {
  WaveParams params;
  Orbit orbit;
  double k = 0.0;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> dphi;   ///< d phi / d theta
  std::vector<double> d2phi;  ///< spectral second derivative
  std::vector<std::complex<double>> fourier;  ///< dft() of phi
  double quadrature_residual = 0.0;  ///< max |k^2 phi'^2/2 - (E - V)|
  double profile_residual = 0.0;     ///< max-norm of the rescaled profile equation
  bool under_resolved = false;       ///< profile_residual above kProfileTolerance
  bool near_singular = false;

  int size() const { return static_cast<int>(phi.size()); }
  /// Coefficient of Fourier mode j.
  std::complex<double> mode(int j) const;
  /// l2 norm of the modes |j| > N relative to that of all modes j != 0.
  double tail_ratio(int N) const;
};

/// n must be a power of two >= 64.
WaveProfile profile(const WaveParams& p, int n = kDefaultGrid);
WaveProfile orbit_profile(const Orbit& o, int n = kDefaultGrid);

/// Doubles n (up to max_n) until the profile residual is below kProfileTolerance.
WaveProfile resolved_profile(const WaveParams& p, int n = kDefaultGrid, int max_n = 4096);

/// Fluxes evaluated on a sampled profile by grid means.
AveragedFluxes averaged_fluxes(const WaveProfile& w);

/// d(T, M, P)/d(a, E, c) (totals), rows T, M, P and columns a, E, c.
struct ParamDerivatives {
  std::array<std::array<double, 3>, 3> d{};
  double T_a = 0.0;
};

/// Central differences in (a, E, c) with one Richardson step. The step for
/// coordinate x is step * max(|x|, 1). Throws StencilLeavesRegion.
ParamDerivatives d_params(const WaveParams& p, double step = 1e-5, int nodes = kDefaultNodes);

/// Same derivatives from orbit_gradients and the chain rule.
ParamDerivatives d_params_exact(const WaveParams& p, int nodes = kDefaultNodes);

}  // namespace chm
