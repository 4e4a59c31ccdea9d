#include "chm/stokes.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "chm/error.hpp"
#include "chm/spectral.hpp"

namespace chm {

namespace {
using std::numbers::pi;

double x_of(double k) { return 4.0 * pi * pi * k * k; }
}  // namespace

double omega0(double k, double M) {
  const double x = x_of(k);
  return (3.0 * k * M + x * k * M) / (1.0 + x);
}

double omega2(double k, double M) {
  const double x = x_of(k);
  return 3.0 * (1.0 + x) * (1.0 + x) / (64.0 * k * M * pi * pi);
}

double domega0_dk(double k, double M) {
  const double x = x_of(k);
  const double num = (3.0 + 3.0 * x) * (1.0 + x) - (3.0 * k + x * k) * 8.0 * pi * pi * k;
  return M * num / ((1.0 + x) * (1.0 + x));
}

double psi2_coefficient(double k, double M) {
  const double x = x_of(k);
  return (1.0 + x) * (1.0 + x) / (32.0 * k * k * M * pi * pi);
}

double gap_coefficient(double k) {
  const double x = x_of(k);
  return (3.0 - x) / (4.0 * (1.0 + x));
}

double critical_frequency() { return std::sqrt(3.0) / (2.0 * pi); }

double stokes_momentum(double k, double M, double A) { return 0.5 * M * M + 0.25 * (1.0 + x_of(k)) * A * A; }

double stokes_amplitude(double k, double M, double P) {
  const double d = P - 0.5 * M * M;
  if (d < 0.0) throw Error(ErrorKind::InvalidInput, "P below M^2/2 has no real amplitude");
  return std::sqrt(4.0 * d / (1.0 + x_of(k)));
}

WaveProfile stokes_profile(const StokesParams& p, int n) {
  if (!(p.k > 0.0) || !(p.M > 0.0)) throw Error(ErrorKind::InvalidInput, "Stokes expansion needs k > 0 and M > 0");
  if (std::abs(p.A) > kStokesAmplitudeGuard * p.M) {
    throw Error(ErrorKind::AmplitudeTooLarge, "|A| exceeds 0.01 M, outside the asymptotic regime");
  }
  if (n < 64 || (n & (n - 1)) != 0) throw Error(ErrorKind::InvalidInput, "grid size must be a power of two >= 64");
  const double k = p.k;
  const double k2 = k * k;
  const double A = p.A;
  const double b = A * A * psi2_coefficient(k, p.M);
  const double c = (omega0(k, p.M) + A * A * omega2(k, p.M)) / k;
  WaveProfile w;
  w.k = k;
  const auto N = static_cast<std::size_t>(n);
  w.theta.resize(N);
  w.phi.resize(N);
  w.dphi.resize(N);
  w.d2phi.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double t = static_cast<double>(j) / n;
    const double a1 = 2.0 * pi * t;
    const double a2 = 4.0 * pi * t;
    w.theta[j] = t;
    w.phi[j] = p.M + A * std::cos(a1) + b * std::cos(a2);
    w.dphi[j] = -2.0 * pi * A * std::sin(a1) - 4.0 * pi * b * std::sin(a2);
    w.d2phi[j] = -4.0 * pi * pi * A * std::cos(a1) - 16.0 * pi * pi * b * std::cos(a2);
  }
  double Em = 0.0;
  std::vector<double> lhs(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double f = w.phi[j];
    lhs[j] = -k2 * (c - f) * w.d2phi[j] + c * f - 1.5 * f * f + 0.5 * k2 * w.dphi[j] * w.dphi[j];
    Em += lhs[j];
  }
  Em /= n;
  double am = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const double f = w.phi[j];
    am += (c - f) * (Em + 0.5 * f * f - 0.5 * k2 * w.dphi[j] * w.dphi[j]);
  }
  am /= n;
  w.params = {am, Em, c};
  w.fourier = dft(w.phi);
  for (std::size_t j = 0; j < N; ++j) {
    const double f = w.phi[j];
    w.profile_residual = std::max(w.profile_residual, std::abs(lhs[j] - Em));
    const double q = 0.5 * k2 * w.dphi[j] * w.dphi[j] - (Em + 0.5 * f * f - am / (c - f));
    w.quadrature_residual = std::max(w.quadrature_residual, std::abs(q));
  }
  w.under_resolved = !(w.profile_residual < kProfileTolerance);
  if (A != 0.0) w.orbit = orbit_from_turning_points(p.M - std::abs(A) + b, p.M + std::abs(A) + b, c);
  else w.orbit = orbit_from_turning_points(p.M, p.M, c);
  return w;
}

std::array<double, 3> stokes_whitham_eigs(const StokesParams& p) {
  const double d = domega0_dk(p.k, p.M);
  const double g = gap_coefficient(p.k);
  return {-3.0 * p.M, -d + g * p.A, -d - g * p.A};
}

StokesWave stokes_wave(const StokesParams& p, int n, int nodes) {
  if (!(p.k > 0.0) || !(p.M > 0.0) || !(p.A > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "numeric Stokes waves need k, M, A > 0");
  }
  const Eigen::Vector3d target(p.k, p.M, p.A);
  auto eval = [&](const Eigen::Vector3d& y) {
    const Orbit o{y(0), y(1), y(2)};
    const WaveFunctionals f = orbit_functionals(o, nodes);
    const WaveProfile w = orbit_profile(o, n);
    return Eigen::Vector3d(f.k, f.M_mean, 2.0 * w.mode(1).real());
  };
  auto admissible = [](const Eigen::Vector3d& y) { return y(1) > 0.0 && Orbit{y(0), y(1), y(2)}.admissible(); };

  Eigen::Vector3d y(p.M + p.A * p.A * psi2_coefficient(p.k, p.M), p.A,
                    (omega0(p.k, p.M) + p.A * p.A * omega2(p.k, p.M)) / p.k);
  if (!admissible(y)) throw Error(ErrorKind::AmplitudeTooLarge, "amplitude too large for the Stokes initial guess");
  Eigen::Vector3d F = eval(y) - target;
  auto rel = [&](const Eigen::Vector3d& r) { return (r.array() / target.array()).abs().maxCoeff(); };
  double res = rel(F);
  int it = 0;
  for (; it < 40 && res > 1e-15; ++it) {
    Eigen::Matrix3d Jm;
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-6 * (j == 1 ? p.A : std::abs(y(j)));
      Eigen::Vector3d yp = y, ym = y;
      yp(j) += h;
      ym(j) -= h;
      Jm.col(j) = (eval(yp) - eval(ym)) / (2.0 * h);
    }
    const Eigen::Vector3d dy = Jm.fullPivLu().solve(-F);
    double lambda = 1.0;
    bool ok = false;
    for (int h = 0; h < 30; ++h, lambda *= 0.5) {
      const Eigen::Vector3d trial = y + lambda * dy;
      if (!admissible(trial)) continue;
      const Eigen::Vector3d Ft = eval(trial) - target;
      const double r = rel(Ft);
      if (r < res || h == 0) {
        if (!(r < res) && r > 10.0 * res + 1e-15) continue;
        const bool progress = r < 0.5 * res;
        y = trial;
        F = Ft;
        res = r;
        ok = progress || res < 1e-15;
        break;
      }
    }
    if (!ok) break;
  }
  if (!(res < 1e-12)) throw Error(ErrorKind::NewtonDivergence, "Stokes wave Newton iteration did not converge");
  StokesWave sw;
  sw.orbit = Orbit{y(0), y(1), y(2)};
  sw.params = sw.orbit.params();
  sw.kmp = orbit_kmp(sw.orbit, nodes);
  sw.omega = sw.kmp[0] * sw.orbit.c;
  sw.A = 2.0 * orbit_profile(sw.orbit, n).mode(1).real();
  sw.iterations = it;
  return sw;
}

}  // namespace chm
