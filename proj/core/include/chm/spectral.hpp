#pragma once

// Discrete Fourier helpers on the unit period and on [0, pi] cosine series.

#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace chm {

using cplx = std::complex<double>;

/// Normalised coefficients f_hat[j] = (1/n) sum_l f[l] exp(-2 pi i j l / n).
/// Index j stands for mode j when j <= n/2 and for j - n otherwise.
std::vector<cplx> dft(const std::vector<double>& f);

/// Inverse of dft() for Hermitian coefficient sets; returns the real part.
std::vector<double> idft_real(const std::vector<cplx>& fhat);

/// Coefficient of mode j (may be negative) in a dft() array. The Nyquist
/// coefficient is split evenly between +n/2 and -n/2; modes beyond are zero.
cplx mode_coefficient(const std::vector<cplx>& fhat, int j);

/// d^order f / d theta^order on the unit period, by the symbol (2 pi i n)^order.
std::vector<double> spectral_derivative(const std::vector<double>& f, int order);

/// Cosine coefficients a_0..a_K of an even 2 pi-periodic function g on [0, pi]:
/// g(s) ~ a_0 + sum a_j cos(j s). Sampled on 2K equispaced points.
std::vector<double> cosine_series(const std::function<double(double)>& g, int K);

/// sum_{j >= 1} b[j] sin(j s) by Clenshaw's recurrence. b[0] is ignored.
double sine_sum(const std::vector<double>& b, double s);

/// Midpoint rule on [0, pi] with `nodes` points; spectrally accurate for even
/// 2 pi-periodic analytic integrands.
inline double midpoint_node(int j, int nodes) { return (j + 0.5) * std::numbers::pi / nodes; }

}  // namespace chm
