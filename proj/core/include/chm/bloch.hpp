#pragma once

// Fourier (Hill's method) discretisation of the linearised and Bloch operators
// about a periodic wave, the generalised kernel of A0 and the matrix D0 whose
// eigenvalues are the slopes of the three spectral curves through the origin.
//
// Vectors hold the coefficients of modes -N..N (index n + N). The inner
// product is <f, g> = sum conj(f_n) g_n, the theta-mean of conj(f) g.

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <vector>

#include "chm/quadrature.hpp"
#include "chm/reparam.hpp"

namespace chm {

enum class OperatorLabel { L0, L1, L2, J0, J1, J2, A0, A1, A2, Axi };

std::string_view to_string(OperatorLabel l) noexcept;

struct FourierOperator {
  int N = 0;
  Eigen::MatrixXcd mat;
  OperatorLabel label = OperatorLabel::L0;
  double xi = 0.0;
};

inline constexpr int kDefaultModes = 64;
inline constexpr double kTruncationTol = 1e-10;

/// Builds one operator. For L0, J0 and A0 a supplied xi replaces d/d theta by
/// d/d theta + i xi (the Bloch operators); Axi requires xi. The expansion
/// operators L1, L2, J1, J2, A1, A2 are the coefficients of (i k xi) and
/// (i k xi)^2 and ignore xi. Throws TruncationTooSmall when the profile carries
/// relative l2 mass above 1e-10 beyond mode N, and InvalidInput when the
/// profile grid cannot resolve the products (n < 4N).
FourierOperator assemble(const WaveProfile& w, OperatorLabel label, int N = kDefaultModes,
                         std::optional<double> xi = std::nullopt);

struct OperatorSet {
  int N = 0;
  Eigen::MatrixXcd L0, L1, L2, J0, J1, J2, A0, A1, A2;
  Eigen::VectorXcd D;  ///< symbol of d/d theta, 2 pi i n
};

OperatorSet assemble_all(const WaveProfile& w, int N = kDefaultModes);

/// Coefficients of modes -N..N of grid samples on [0, 1).
Eigen::VectorXcd grid_to_modes(const std::vector<double>& f, int N);
/// Real grid samples of a coefficient vector on n points.
std::vector<double> modes_to_grid(const Eigen::VectorXcd& v, int n);

struct KernelBasis {
  Eigen::VectorXcd Phi1, Phi2, Phi3;  ///< phi', phi_M, phi_P
  Eigen::VectorXcd phi_k;
  Eigen::VectorXcd Psi1, Psi2, Psi3;  ///< beta, 1, phi - k^2 phi''
  Eigen::Matrix3cd gram;              ///< gram(j, l) = <Psi_j, Phi_l>
  Eigen::VectorXd singular_values;    ///< of A0, ascending
  int nullity = 0;                    ///< singular values below 1e-8 ||A0||_2
};

inline constexpr double kNullityTol = 1e-8;

/// Throws KernelDimensionMismatch when A0 does not have the two-dimensional
/// kernel span{phi', c_P phi_M - c_M phi_P} on the truncated space, and
/// DegenerateChart when T_a = 0 or M_c = P_c = 0 numerically.
KernelBasis kernel_basis(const WaveProfile& w, const Chart& ch, const ProfilePartials& pp,
                         const OperatorSet& ops);

Eigen::Matrix3cd d0_matrix(const KernelBasis& b, const OperatorSet& ops, const Chart& ch,
                           const WaveProfile& w);

struct SpectralCurves {
  std::vector<double> xis;
  std::vector<std::array<std::complex<double>, 3>> lambdas;  ///< matched across xi
  std::vector<std::array<std::complex<double>, 3>> mus;      ///< lambda / (i k xi)
  std::array<std::complex<double>, 3> d0_eigs{};
  std::array<std::complex<double>, 3> mu_limit{};  ///< order-1 Richardson in xi
  double observed_order = 0.0;  ///< log-log slope of max_j |mu_j - d0_eig_j| against xi
  std::vector<double> errors;   ///< max_j |mu_j(xi) - d0_eig_j| per xi
  int refinements = 0;          ///< xi steps inserted to resolve matching ambiguity
};

/// Default xi list 0.1 * 2^-j, j = 0..6, in decreasing order.
std::vector<double> default_xi_list();

/// Eigenvalues of A_xi (full Bloch substitution) nearest the origin, matched
/// across xi by nearest neighbour after scaling by 1/(i k xi) and starting from
/// eig(D0). Throws MatchingAmbiguity when halving the xi step does not resolve
/// a non-injective match.
SpectralCurves bloch_curves(const WaveProfile& w, const Eigen::Matrix3cd& d0, int N,
                            const std::vector<double>& xis);

std::array<std::complex<double>, 3> eigenvalues3(const Eigen::Matrix3cd& m);

enum class Verdict { Stable, Unstable, Degenerate };
std::string_view to_string(Verdict v) noexcept;

inline constexpr double kDefaultTolIm = 1e-6;
inline constexpr double kDefaultTolGap = 1e-8;

Verdict modulational_verdict(const std::array<std::complex<double>, 3>& d0_eigs,
                             double tol_im = kDefaultTolIm, double tol_gap = kDefaultTolGap);
Verdict modulational_verdict(const SpectralCurves& curves, double tol_im = kDefaultTolIm,
                             double tol_gap = kDefaultTolGap);

/// Full truncated spectrum of A_xi.
Eigen::VectorXcd bloch_spectrum(const WaveProfile& w, int N, double xi);

struct SymmetryReport {
  double norm = 0.0;        ///< ||A_xi||_2
  double reflection = 0.0;  ///< Hausdorff distance between sigma(A_xi) and -conj sigma(A_xi)
  double pairing = 0.0;     ///< Hausdorff distance between sigma(A_-xi) and conj sigma(A_xi)
};

SymmetryReport spectral_symmetry(const WaveProfile& w, int N, double xi);

/// Symmetric Hausdorff distance between two finite point sets in C.
double hausdorff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace chm
