#pragma once

// The Whitham modulation matrix W in the (k, M, P) chart: the system
// (k, M, P)_T = W (k, M, P)_X built from conservation of waves k_T + (kc)_X = 0
// and the averaged balance laws M_T = (qM)_X, P_T = (qP)_X.

#include <array>
#include <complex>
#include <string_view>

#include "chm/quadrature.hpp"
#include "chm/reparam.hpp"

namespace chm {

enum class Hyperbolicity { StrictlyHyperbolic, WeaklyHyperbolic, Elliptic };

std::string_view to_string(Hyperbolicity h) noexcept;

inline constexpr double kWhithamTolIm = 1e-6;
inline constexpr double kWhithamTolGap = 1e-8;

/// Eigenvalues of a real 3x3 matrix sorted by real part, then imaginary part.
std::array<std::complex<double>, 3> eigenvalues(const Mat3& m);

/// Elliptic iff some |Im| > tol_im * rho, strictly hyperbolic iff the sorted
/// real parts are separated by more than tol_gap * rho (rho the spectral radius).
Hyperbolicity classify(const Mat3& m, double tol_im = kWhithamTolIm, double tol_gap = kWhithamTolGap);

struct WhithamMatrix {
  Mat3 W{};
  std::array<std::complex<double>, 3> eigenvalues{};
  Hyperbolicity classification = Hyperbolicity::StrictlyHyperbolic;
  Vec3 at{};
  WaveParams params;
  double c = 0.0;
};

enum class WhithamMethod {
  Exact,             ///< forward-mode derivatives of the orbit quadratures
  FiniteDifference,  ///< central differences of profile-averaged fluxes along (k, M, P) lines
};

struct WhithamOptions {
  WhithamMethod method = WhithamMethod::Exact;
  double fd_step = 1e-5;
  int nodes = kDefaultNodes;
  int grid = kDefaultGrid;
  double tol_im = kWhithamTolIm;
  double tol_gap = kWhithamTolGap;
};

WhithamMatrix whitham_matrix(const Orbit& o, const WhithamOptions& opt = {});
WhithamMatrix whitham_matrix(const WaveParams& p, const WhithamOptions& opt = {});
/// Locates the wave with from_kmp first.
WhithamMatrix whitham_matrix(const Vec3& kmp, const WaveParams& guess, const WhithamOptions& opt = {});

}  // namespace chm
