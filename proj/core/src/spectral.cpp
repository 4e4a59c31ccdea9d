#include "chm/spectral.hpp"

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

namespace chm {

std::vector<cplx> dft(const std::vector<double>& f) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, f);
  const double inv = 1.0 / static_cast<double>(f.size());
  for (auto& z : out) z *= inv;
  return out;
}

std::vector<double> idft_real(const std::vector<cplx>& fhat) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.inv(out, fhat);
  std::vector<double> f(fhat.size());
  const double n = static_cast<double>(fhat.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = out[j].real() * n;
  return f;
}

cplx mode_coefficient(const std::vector<cplx>& fhat, int j) {
  const int n = static_cast<int>(fhat.size());
  const int half = n / 2;
  if (j > half || j < -half) return {0.0, 0.0};
  if (n % 2 == 0 && (j == half || j == -half)) return 0.5 * fhat[static_cast<std::size_t>(half)];
  return fhat[static_cast<std::size_t>((j + n) % n)];
}

std::vector<double> spectral_derivative(const std::vector<double>& f, int order) {
  std::vector<cplx> fh = dft(f);
  const int n = static_cast<int>(f.size());
  for (int j = 0; j < n; ++j) {
    const int mode = j <= n / 2 ? j : j - n;
    if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
      fh[static_cast<std::size_t>(j)] = 0.0;
      continue;
    }
    const cplx sym(0.0, 2.0 * std::numbers::pi * mode);
    fh[static_cast<std::size_t>(j)] *= std::pow(sym, order);
  }
  return idft_real(fh);
}

std::vector<double> cosine_series(const std::function<double(double)>& g, int K) {
  const int n = 2 * K;
  std::vector<double> samples(static_cast<std::size_t>(n));
  for (int j = 0; j <= K; ++j) {
    const double v = g(j * std::numbers::pi / K);
    samples[static_cast<std::size_t>(j)] = v;
    if (j > 0 && j < K) samples[static_cast<std::size_t>(n - j)] = v;
  }
  const std::vector<cplx> fh = dft(samples);
  std::vector<double> a(static_cast<std::size_t>(K) + 1);
  a[0] = fh[0].real();
  for (int j = 1; j < K; ++j) a[static_cast<std::size_t>(j)] = 2.0 * fh[static_cast<std::size_t>(j)].real();
  a[static_cast<std::size_t>(K)] = fh[static_cast<std::size_t>(K)].real();
  return a;
}

double sine_sum(const std::vector<double>& b, double s) {
  // b_{k} = c_k + 2 cos(s) b_{k+1} - b_{k+2}; sum = b_1 sin(s).
  const double two_cos = 2.0 * std::cos(s);
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t j = b.size(); j-- > 1;) {
    const double t = b[j] + two_cos * b1 - b2;
    b2 = b1;
    b1 = t;
  }
  return b1 * std::sin(s);
}

}  // namespace chm
