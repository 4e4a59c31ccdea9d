#pragma once

// Small-amplitude (Stokes) expansion about a constant state M:
//   phi = M + A cos(2 pi theta) + A^2 psi2 cos(4 pi theta) + O(A^3),
//   omega = k c = omega0(k, M) + A^2 omega2(k, M) + O(A^4).

#include <array>

#include "chm/quadrature.hpp"
#include "chm/reparam.hpp"

namespace chm {

struct StokesParams {
  double k = 0.0;
  double M = 0.0;
  double A = 0.0;
};

double omega0(double k, double M);
double omega2(double k, double M);
double domega0_dk(double k, double M);
/// Coefficient of A^2 cos(4 pi theta).
double psi2_coefficient(double k, double M);
/// g(k) = (3 - 4 k^2 pi^2) / (4 (1 + 4 k^2 pi^2)), half the leading-order gap per unit A.
double gap_coefficient(double k);
/// sqrt(3) / (2 pi), the zero of gap_coefficient.
double critical_frequency();
/// Mean momentum M^2/2 + ((1 + 4 k^2 pi^2)/4) A^2 to second order.
double stokes_momentum(double k, double M, double A);
/// Amplitude A >= 0 with stokes_momentum(k, M, A) = P.
double stokes_amplitude(double k, double M, double P);

inline constexpr double kStokesAmplitudeGuard = 0.01;

/// The truncated expansion sampled on n points, with c = omega/k, E the mean of
/// the profile operator and a the mean of (c - phi)(E + phi^2/2 - k^2 phi'^2/2).
/// Residuals are O(A^3). Throws AmplitudeTooLarge unless |A| <= 0.01 M.
WaveProfile stokes_profile(const StokesParams& p, int n = kDefaultGrid);

/// {-3M, -omega0_k + g A, -omega0_k - g A}.
std::array<double, 3> stokes_whitham_eigs(const StokesParams& p);

/// The exact periodic wave with frequency k, mean M and first cosine
/// coefficient A/2 (so A = 2 phi_hat_1), found by Newton in orbit coordinates.
struct StokesWave {
  Orbit orbit;
  WaveParams params;
  Vec3 kmp{};
  double omega = 0.0;
  double A = 0.0;
  int iterations = 0;
};

StokesWave stokes_wave(const StokesParams& p, int n = kDefaultGrid, int nodes = kDefaultNodes);

}  // namespace chm
