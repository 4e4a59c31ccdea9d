#include "chm/whitham.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "chm/error.hpp"

namespace chm {

std::string_view to_string(Hyperbolicity h) noexcept {
  switch (h) {
    case Hyperbolicity::StrictlyHyperbolic: return "StrictlyHyperbolic";
    case Hyperbolicity::WeaklyHyperbolic: return "WeaklyHyperbolic";
    case Hyperbolicity::Elliptic: return "Elliptic";
  }
  return "unknown";
}

std::array<std::complex<double>, 3> eigenvalues(const Mat3& m) {
  Eigen::Matrix3d A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::EigenSolver<Eigen::Matrix3d> es(A, false);
  std::array<std::complex<double>, 3> e = {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return e;
}

Hyperbolicity classify(const Mat3& m, double tol_im, double tol_gap) {
  const auto e = eigenvalues(m);
  double rho = 0.0;
  for (const auto& z : e) rho = std::max(rho, std::abs(z));
  for (const auto& z : e)
    if (std::abs(z.imag()) > tol_im * rho) return Hyperbolicity::Elliptic;
  const double gap = std::min(e[1].real() - e[0].real(), e[2].real() - e[1].real());
  return (rho > 0.0 && gap > tol_gap * rho) ? Hyperbolicity::StrictlyHyperbolic : Hyperbolicity::WeaklyHyperbolic;
}

namespace {

Eigen::Matrix3d kmp_jacobian(const OrbitGradients& g) {
  Eigen::Matrix3d K;
  for (int j = 0; j < 3; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    K(0, j) = g.k.grad[jj];
    K(1, j) = g.M_mean.grad[jj];
    K(2, j) = g.P_mean.grad[jj];
  }
  return K;
}

}  // namespace

WhithamMatrix whitham_matrix(const Orbit& o, const WhithamOptions& opt) {
  const Chart ch = orbit_chart(o, opt.nodes);
  WhithamMatrix wm;
  wm.at = ch.kmp;
  wm.params = ch.at;
  wm.c = o.c;
  const double k = ch.kmp[0];
  const double c = o.c;
  wm.W[0] = {-k * ch.c_partials[0] - c, -k * ch.c_partials[1], -k * ch.c_partials[2]};

  if (opt.method == WhithamMethod::Exact) {
    const OrbitGradients g = orbit_gradients(o, opt.nodes);
    const Eigen::Matrix3d Kinv = kmp_jacobian(g).inverse();
    const Eigen::RowVector3d qM(g.qM.grad[0], g.qM.grad[1], g.qM.grad[2]);
    const Eigen::RowVector3d qP(g.qP.grad[0], g.qP.grad[1], g.qP.grad[2]);
    const Eigen::RowVector3d rM = qM * Kinv;
    const Eigen::RowVector3d rP = qP * Kinv;
    wm.W[1] = {rM(0), rM(1), rM(2)};
    wm.W[2] = {rP(0), rP(1), rP(2)};
  } else {
    const Vec3 h = kmp_steps(ch.kmp, opt.fd_step);
    for (std::size_t i = 0; i < 3; ++i) {
      auto flux = [&](double off) {
        Vec3 t = ch.kmp;
        t[i] += off;
        return averaged_fluxes(orbit_profile(orbit_from_kmp(t, o, nullptr, opt.nodes), opt.grid));
      };
      const AveragedFluxes p1 = flux(h[i]), m1 = flux(-h[i]), p2 = flux(2.0 * h[i]), m2 = flux(-2.0 * h[i]);
      auto rich = [&](double a1, double b1, double a2, double b2) {
        const double d1 = (a1 - b1) / (2.0 * h[i]);
        const double d2 = (a2 - b2) / (4.0 * h[i]);
        return (4.0 * d1 - d2) / 3.0;
      };
      wm.W[1][i] = rich(p1.qM, m1.qM, p2.qM, m2.qM);
      wm.W[2][i] = rich(p1.qP, m1.qP, p2.qP, m2.qP);
    }
  }
  wm.eigenvalues = eigenvalues(wm.W);
  wm.classification = classify(wm.W, opt.tol_im, opt.tol_gap);
  return wm;
}

WhithamMatrix whitham_matrix(const WaveParams& p, const WhithamOptions& opt) {
  WhithamMatrix wm = whitham_matrix(orbit_of(p), opt);
  wm.params = p;
  return wm;
}

WhithamMatrix whitham_matrix(const Vec3& kmp, const WaveParams& guess, const WhithamOptions& opt) {
  return whitham_matrix(orbit_from_kmp(kmp, orbit_of(guess), nullptr, opt.nodes), opt);
}

}  // namespace chm
