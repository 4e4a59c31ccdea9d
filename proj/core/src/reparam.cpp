#include "chm/reparam.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "chm/bloch.hpp"
#include "chm/error.hpp"

namespace chm {

namespace {

Mat3 to_mat3(const Eigen::Matrix3d& m) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

Vec3 row(const Eigen::Matrix3d& m, int i) { return {m(i, 0), m(i, 1), m(i, 2)}; }

void fill_row(Eigen::Matrix3d& m, int i, const Graded& g) {
  for (int j = 0; j < 3; ++j) m(i, j) = g.grad[static_cast<std::size_t>(j)];
}

// d(k, M, P)/d(m, rho, c) and d(a, E, c)/d(m, rho, c).
struct OrbitJacobians {
  Eigen::Matrix3d K;
  Eigen::Matrix3d G;
  Vec3 kmp{};
};

OrbitJacobians orbit_jacobians(const Orbit& o, int nodes) {
  const OrbitGradients g = orbit_gradients(o, nodes);
  OrbitJacobians out;
  fill_row(out.K, 0, g.k);
  fill_row(out.K, 1, g.M_mean);
  fill_row(out.K, 2, g.P_mean);
  fill_row(out.G, 0, g.a);
  fill_row(out.G, 1, g.E);
  out.G.row(2) << 0.0, 0.0, 1.0;
  out.kmp = {g.k.value, g.M_mean.value, g.P_mean.value};
  return out;
}

bool admissible_coords(const Eigen::Vector3d& y) {
  if (!(y(1) > 0.0) || !(y(2) > 0.0)) return false;
  const Orbit o = OrbitCoords{y(0), y(1), y(2)}.orbit();
  return o.admissible() && std::isfinite(o.mid);
}

double relative_residual(const Vec3& v, const Vec3& target) {
  double r = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    r = std::max(r, std::abs(v[i] - target[i]) / std::max(std::abs(target[i]), 1e-300));
  }
  return r;
}

}  // namespace

Chart orbit_chart(const Orbit& o, int nodes) {
  const OrbitJacobians oj = orbit_jacobians(o, nodes);
  const Eigen::Matrix3d J = oj.K * oj.G.inverse();
  const double detJ = oj.K.determinant() / oj.G.determinant();
  const double norm = J.norm();
  if (!(std::abs(detJ) >= kDegenerateChartTol * norm * norm * norm)) {
    throw Error(ErrorKind::DegenerateChart, "d(k, M, P)/d(a, E, c) is numerically singular");
  }
  const Eigen::Matrix3d Jinv = oj.G * oj.K.inverse();
  Chart ch;
  ch.orbit = o;
  ch.at = o.params();
  ch.kmp = oj.kmp;
  ch.J = to_mat3(J);
  ch.Jinv = to_mat3(Jinv);
  ch.a_partials = row(Jinv, 0);
  ch.E_partials = row(Jinv, 1);
  ch.c_partials = row(Jinv, 2);
  ch.det_J = detJ;
  ch.functionals = orbit_functionals(o, nodes);
  return ch;
}

Chart chart(const WaveParams& p, int nodes) {
  Chart ch = orbit_chart(orbit_of(p), nodes);
  ch.at = p;
  return ch;
}

Vec3 orbit_kmp(const Orbit& o, int nodes) {
  const WaveFunctionals f = orbit_functionals(o, nodes);
  return {f.k, f.M_mean, f.P_mean};
}

Vec3 to_kmp(const WaveParams& p, int nodes) { return orbit_kmp(orbit_of(p), nodes); }

Orbit orbit_from_kmp(const Vec3& target, const Orbit& guess, NewtonReport* report, int nodes) {
  if (!(target[0] > 0.0) || !std::isfinite(target[1]) || !std::isfinite(target[2])) {
    throw Error(ErrorKind::InvalidInput, "k must be positive and M, P finite");
  }
  const OrbitCoords y0 = OrbitCoords::of(guess);
  Eigen::Vector3d y(y0.m, y0.rho, y0.c);
  if (!admissible_coords(y)) throw Error(ErrorKind::NotInRegion, "Newton guess is not an interior wave");

  auto residual_at = [&](const Eigen::Vector3d& z) {
    return relative_residual(orbit_kmp(OrbitCoords{z(0), z(1), z(2)}.orbit(), nodes), target);
  };

  double res = residual_at(y);
  int it = 0;
  int stalled = 0;
  for (; it < 60 && res > 1e-15; ++it) {
    const OrbitJacobians oj = orbit_jacobians(OrbitCoords{y(0), y(1), y(2)}.orbit(), nodes);
    const Eigen::Vector3d F(oj.kmp[0] - target[0], oj.kmp[1] - target[1], oj.kmp[2] - target[2]);
    const Eigen::Vector3d dy = oj.K.fullPivLu().solve(-F);
    if (!dy.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h, lambda *= 0.5) {
      const Eigen::Vector3d trial = y + lambda * dy;
      if (!admissible_coords(trial)) continue;
      const double r = residual_at(trial);
      if (r < res || (h == 0 && r < 4.0 * res + 1e-14)) {
        stalled = (r > 0.5 * res) ? stalled + 1 : 0;
        y = trial;
        res = r;
        accepted = true;
        break;
      }
    }
    if (!accepted || stalled >= 3) break;
  }
  if (report) {
    report->iterations = it;
    report->residual = res;
  }
  if (!(res < 1e-10)) {
    throw Error(ErrorKind::NewtonDivergence, "no wave with the requested (k, M, P) was found from this guess");
  }
  return OrbitCoords{y(0), y(1), y(2)}.orbit();
}

WaveParams from_kmp(const Vec3& kmp, const WaveParams& guess, NewtonReport* report, int nodes) {
  return orbit_from_kmp(kmp, orbit_of(guess), report, nodes).params();
}

Vec3 kmp_steps(const Vec3& kmp, double step) {
  const double k = kmp[0];
  const double M = kmp[1];
  const double P = kmp[2];
  const double dP = P - 0.5 * M * M;
  Vec3 h{};
  h[0] = step * k;
  h[1] = step * std::max(std::abs(M), 1.0);
  if (std::abs(M) > 0.0) h[1] = std::min(h[1], 0.05 * dP / std::abs(M));
  h[2] = std::min(step * std::max(std::abs(P), 1.0), 0.05 * dP);
  return h;
}

ProfilePartials profile_partials(const WaveProfile& w, const Chart& ch, PartialsMethod method, int N,
                                 double step) {
  const int n = w.size();
  ProfilePartials out;
  if (method == PartialsMethod::FiniteDifference) {
    const Vec3 h = kmp_steps(ch.kmp, step);
    std::array<std::vector<double>*, 3> dst = {&out.phi_k, &out.phi_M, &out.phi_P};
    for (std::size_t i = 0; i < 3; ++i) {
      auto at = [&](double off) {
        Vec3 t = ch.kmp;
        t[i] += off;
        return orbit_profile(orbit_from_kmp(t, w.orbit), n).phi;
      };
      const auto p1 = at(h[i]), m1 = at(-h[i]), p2 = at(2.0 * h[i]), m2 = at(-2.0 * h[i]);
      dst[i]->resize(static_cast<std::size_t>(n));
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
        const double d1 = (p1[j] - m1[j]) / (2.0 * h[i]);
        const double d2 = (p2[j] - m2[j]) / (4.0 * h[i]);
        (*dst[i])[j] = (4.0 * d1 - d2) / 3.0;
      }
    }
    return out;
  }

  if (N <= 0) N = n / 4;
  const int dim = 2 * N + 1;
  const double k = w.k;
  const double c = w.params.c;
  const FourierOperator L0 = assemble(w, OperatorLabel::L0, N);
  const Eigen::VectorXcd phat = grid_to_modes(w.phi, N);
  const Eigen::VectorXcd dphi = grid_to_modes(w.dphi, N);
  const Eigen::VectorXcd psi3 = phat - k * k * grid_to_modes(w.d2phi, N);

  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(dim + 1, dim + 1);
  B.topLeftCorner(dim, dim) = L0.mat;
  B.block(0, dim, dim, 1) = dphi;
  B.block(dim, 0, 1, dim) = dphi.adjoint();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);

  std::vector<double> fk(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < fk.size(); ++j) {
    fk[j] = 2.0 * k * (c - w.phi[j]) * w.d2phi[j] - k * w.dphi[j] * w.dphi[j];
  }
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(dim + 1, 3);
  rhs.block(0, 0, dim, 1) = grid_to_modes(fk, N) - ch.c_partials[0] * psi3;
  rhs.block(0, 1, dim, 1) = -ch.c_partials[1] * psi3;
  rhs.block(0, 2, dim, 1) = -ch.c_partials[2] * psi3;
  for (int i = 0; i < 3; ++i) rhs(N, i) += ch.E_partials[static_cast<std::size_t>(i)];
  const Eigen::MatrixXcd sol = lu.solve(rhs);
  out.phi_k = modes_to_grid(sol.block(0, 0, dim, 1), n);
  out.phi_M = modes_to_grid(sol.block(0, 1, dim, 1), n);
  out.phi_P = modes_to_grid(sol.block(0, 2, dim, 1), n);
  return out;
}

}  // namespace chm
