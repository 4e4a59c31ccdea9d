#include "chm/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "chm/error.hpp"
#include "chm/spectral.hpp"
#include "jet.hpp"

namespace chm {

namespace {

using detail::Jet;

template <class S>
struct Sums {
  S Iw, Iphiw, Iphi2w, Iphi3w, J0, J1;
};

// Integrals over s in [0, pi] of w, phi w, phi^2 w, phi^3 w, sin^2/w, phi sin^2/w
// with w = sqrt((c - phi)/(phi - phi3)).
template <class S>
Sums<S> orbit_sums(const S& m, const S& r, const S& c, int nodes) {
  Sums<S> z{};
  // c - phi and phi - phi3 written without the cancelling m terms.
  const S cm = c - m;
  const S vm = 3.0 * m - c;
  for (int j = 0; j < nodes; ++j) {
    const double s = midpoint_node(j, nodes);
    const double cs = std::cos(s);
    const double sn = std::sin(s);
    const S rc = r * cs;
    const S phi = m - rc;
    const S u = cm + rc;
    const S v = vm - rc;
    using std::sqrt;
    const S w = sqrt(u / v);
    const S iw = sqrt(v / u);
    const S phiw = phi * w;
    const S phi2w = phi * phiw;
    z.Iw += w;
    z.Iphiw += phiw;
    z.Iphi2w += phi2w;
    z.Iphi3w += phi * phi2w;
    const S si = (sn * sn) * iw;
    z.J0 += si;
    z.J1 += phi * si;
  }
  const double h = std::numbers::pi / nodes;
  for (S* x : {&z.Iw, &z.Iphiw, &z.Iphi2w, &z.Iphi3w, &z.J0, &z.J1}) *x *= h;
  return z;
}

void check_nodes(int nodes) {
  if (nodes < 8) throw Error(ErrorKind::InvalidInput, "quadrature needs at least 8 nodes");
}

void check_orbit(const Orbit& o) {
  if (!o.admissible()) throw Error(ErrorKind::NotInRegion, "orbit is not a smooth periodic orbit below the pole");
}

Graded to_graded(const Jet& j, double r) {
  // d/d rho = (1 / 2r) d/dr
  Graded g;
  g.value = j.v;
  g.grad = {j.d[0], j.d[1] / (2.0 * r), j.d[2]};
  return g;
}

}  // namespace

double orbit_period(const Orbit& o, int nodes) {
  check_nodes(nodes);
  check_orbit(o);
  return 2.0 * orbit_sums<double>(o.mid, o.half_width, o.c, nodes).Iw;
}

WaveFunctionals orbit_functionals(const Orbit& o, int nodes) {
  check_nodes(nodes);
  check_orbit(o);
  const Sums<double> z = orbit_sums<double>(o.mid, o.half_width, o.c, nodes);
  const double r2 = o.rho();
  const WaveParams p = o.params();
  WaveFunctionals f;
  f.T = 2.0 * z.Iw;
  f.k = 1.0 / f.T;
  f.M = 2.0 * z.Iphiw;
  f.P = z.Iphi2w + r2 * z.J0;
  f.F = z.Iphi3w + r2 * z.J1;
  f.action = o.c * f.P - f.F - p.E * f.M;
  f.M_mean = f.M / f.T;
  f.P_mean = f.P / f.T;
  return f;
}

AveragedFluxes orbit_fluxes(const Orbit& o, int nodes) {
  check_nodes(nodes);
  check_orbit(o);
  const Sums<double> z = orbit_sums<double>(o.mid, o.half_width, o.c, nodes);
  const double r2 = o.rho();
  const double T = 2.0 * z.Iw;
  AveragedFluxes q;
  q.qM = (-3.0 * z.Iphi2w - r2 * z.J0) / T;
  q.qP = (2.0 * o.c * r2 * z.J0 - 2.0 * z.Iphi3w - 4.0 * r2 * z.J1) / T;
  return q;
}

OrbitGradients orbit_gradients(const Orbit& o, int nodes) {
  check_nodes(nodes);
  check_orbit(o);
  const double r = std::max(o.half_width, 1e-7 * o.c);
  const Jet m = Jet::variable(o.mid, 0);
  const Jet rr = Jet::variable(r, 1);
  const Jet c = Jet::variable(o.c, 2);
  const Sums<Jet> z = orbit_sums<Jet>(m, rr, c, nodes);
  const Jet r2 = rr * rr;

  const Jet T = 2.0 * z.Iw;
  const Jet M = 2.0 * z.Iphiw;
  const Jet P = z.Iphi2w + r2 * z.J0;
  const Jet F = z.Iphi3w + r2 * z.J1;
  const Jet cm = c - m;
  const Jet a = m * (cm * cm - r2);
  const Jet E = 0.5 * (m * (2.0 * c - 3.0 * m) - r2);

  OrbitGradients g;
  g.T = to_graded(T, r);
  g.M = to_graded(M, r);
  g.P = to_graded(P, r);
  g.F = to_graded(F, r);
  g.k = to_graded(1.0 / T, r);
  g.M_mean = to_graded(M / T, r);
  g.P_mean = to_graded(P / T, r);
  g.qM = to_graded((-3.0 * z.Iphi2w - r2 * z.J0) / T, r);
  g.qP = to_graded((2.0 * c * r2 * z.J0 - 2.0 * z.Iphi3w - 4.0 * r2 * z.J1) / T, r);
  g.a = to_graded(a, r);
  g.E = to_graded(E, r);
  return g;
}

double period(const WaveParams& p, int nodes) { return orbit_period(orbit_of(p), nodes); }

WaveFunctionals functionals(const WaveParams& p, int nodes) {
  WaveFunctionals f = orbit_functionals(orbit_of(p), nodes);
  // Recompute the action with the caller's E rather than the orbit round trip.
  f.action = p.c * f.P - f.F - p.E * f.M;
  return f;
}

// ---------------------------------------------------------------------------
// Profiles

std::complex<double> WaveProfile::mode(int j) const { return mode_coefficient(fourier, j); }

double WaveProfile::tail_ratio(int N) const {
  double tail = 0.0;
  double osc = 0.0;
  const int half = size() / 2;
  for (int j = 1; j <= half; ++j) {
    const double a2 = std::norm(mode(j));
    osc += a2;
    if (j > N) tail += a2;
  }
  if (osc == 0.0) return 0.0;
  return std::sqrt(tail / osc);
}

namespace {

struct ThetaMap {
  std::vector<double> a;  // cosine coefficients of w(s)
  std::vector<double> b;  // a_j / j, the sine coefficients of W(s)
  double k = 0.0;

  // theta(s) = 1/2 - k W(s), W(s) = a_0 s + sum b_j sin(j s).
  double theta(double s) const { return 0.5 - k * (a[0] * s + sine_sum(b, s)); }
};

ThetaMap theta_map(const Orbit& o) {
  const double m = o.mid;
  const double r = o.half_width;
  const double c = o.c;
  auto w = [&](double s) {
    const double rc = r * std::cos(s);
    return std::sqrt((c - m + rc) / (3.0 * m - c - rc));
  };
  ThetaMap map;
  for (int K = 32;; K *= 2) {
    map.a = cosine_series(w, K);
    double tail = 0.0;
    for (int j = 3 * K / 4; j <= K; ++j) tail = std::max(tail, std::abs(map.a[static_cast<std::size_t>(j)]));
    if (tail < 1e-16 * map.a[0] || K >= (1 << 16)) break;
  }
  map.b.assign(map.a.size(), 0.0);
  for (std::size_t j = 1; j < map.a.size(); ++j) map.b[j] = map.a[j] / static_cast<double>(j);
  map.k = 1.0 / (2.0 * std::numbers::pi * map.a[0]);
  return map;
}

}  // namespace

WaveProfile orbit_profile(const Orbit& o, int n) {
  if (n < 64 || (n & (n - 1)) != 0) throw Error(ErrorKind::InvalidInput, "grid size must be a power of two >= 64");
  check_orbit(o);
  WaveProfile w;
  w.orbit = o;
  w.params = o.params();
  const double m = o.mid;
  const double r = o.half_width;
  const double c = o.c;
  const std::size_t N = static_cast<std::size_t>(n);
  w.theta.resize(N);
  w.phi.assign(N, m);
  w.dphi.assign(N, 0.0);
  for (int j = 0; j < n; ++j) w.theta[static_cast<std::size_t>(j)] = static_cast<double>(j) / n;

  if (r == 0.0) {
    w.k = 1.0 / orbit_period(o, kDefaultNodes);
  } else {
    const ThetaMap map = theta_map(o);
    w.k = map.k;
    auto wfun = [&](double s) {
      const double rc = r * std::cos(s);
      return std::sqrt((c - m + rc) / (3.0 * m - c - rc));
    };
    for (int j = 0; j <= n / 2; ++j) {
      const double target = static_cast<double>(j) / n;
      double s = std::numbers::pi * (1.0 - 2.0 * target);
      if (j == 0) {
        s = std::numbers::pi;
      } else if (j == n / 2) {
        s = 0.0;
      } else {
        // theta(s) decreases from 1/2 at s = 0 to 0 at s = pi.
        double lo = 0.0;
        double hi = std::numbers::pi;
        for (int it = 0; it < 100; ++it) {
          const double g = map.theta(s) - target;
          if (g > 0.0) lo = s; else hi = s;
          const double dg = -map.k * wfun(s);
          double next = s - g / dg;
          if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
          const double step = std::abs(next - s);
          s = next;
          if (step < 1e-15) break;
        }
      }
      const double phi = m - r * std::cos(s);
      const double dphi = r * std::sin(s) / (-w.k * wfun(s));
      w.phi[static_cast<std::size_t>(j)] = phi;
      w.dphi[static_cast<std::size_t>(j)] = dphi;
      if (j > 0 && j < n / 2) {
        w.phi[N - static_cast<std::size_t>(j)] = phi;
        w.dphi[N - static_cast<std::size_t>(j)] = -dphi;
      }
    }
    w.dphi[0] = 0.0;
    w.dphi[N / 2] = 0.0;
  }

  w.fourier = dft(w.phi);
  w.d2phi = spectral_derivative(w.phi, 2);

  const WaveParams& p = w.params;
  const double k2 = w.k * w.k;
  for (std::size_t j = 0; j < N; ++j) {
    const double phi = w.phi[j];
    const double dp = w.dphi[j];
    const double q = 0.5 * k2 * dp * dp - (p.E - potential(phi, p.a, p.c));
    const double res = -k2 * (c - phi) * w.d2phi[j] + c * phi - 1.5 * phi * phi + 0.5 * k2 * dp * dp - p.E;
    w.quadrature_residual = std::max(w.quadrature_residual, std::abs(q));
    w.profile_residual = std::max(w.profile_residual, std::abs(res));
  }
  w.under_resolved = !(w.profile_residual < kProfileTolerance);
  w.near_singular = (c - o.phi_max()) < 1e-6 * c;
  return w;
}

WaveProfile profile(const WaveParams& p, int n) {
  WaveProfile w = orbit_profile(orbit_of(p), n);
  w.params = p;
  return w;
}

WaveProfile resolved_profile(const WaveParams& p, int n, int max_n) {
  WaveProfile w = profile(p, n);
  while (w.under_resolved && 2 * n <= max_n) {
    n *= 2;
    w = profile(p, n);
  }
  return w;
}

AveragedFluxes averaged_fluxes(const WaveProfile& w) {
  const double k2 = w.k * w.k;
  const double c = w.params.c;
  double sM = 0.0;
  double sP = 0.0;
  for (int j = 0; j < w.size(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double phi = w.phi[i];
    const double d1 = w.dphi[i];
    sM += -1.5 * phi * phi - 0.5 * k2 * d1 * d1;
    sP += c * k2 * d1 * d1 - phi * phi * phi + k2 * phi * phi * w.d2phi[i];
  }
  return {sM / w.size(), sP / w.size()};
}

// ---------------------------------------------------------------------------
// Parameter derivatives

ParamDerivatives d_params(const WaveParams& p, double step, int nodes) {
  if (region_membership(p) != Region::Interior) throw Error(ErrorKind::NotInRegion, "d_params needs an interior point");
  const std::array<double, 3> x0 = {p.a, p.E, p.c};
  ParamDerivatives out;
  for (int i = 0; i < 3; ++i) {
    const double h = step * std::max(std::abs(x0[static_cast<std::size_t>(i)]), 1.0);
    auto eval = [&](double offset) {
      std::array<double, 3> x = x0;
      x[static_cast<std::size_t>(i)] += offset;
      const WaveParams q{x[0], x[1], x[2]};
      if (region_membership(q) != Region::Interior) {
        throw Error(ErrorKind::StencilLeavesRegion, "finite-difference stencil leaves the interior");
      }
      const WaveFunctionals f = functionals(q, nodes);
      return std::array<double, 3>{f.T, f.M, f.P};
    };
    const auto p1 = eval(h), m1 = eval(-h), p2 = eval(2.0 * h), m2 = eval(-2.0 * h);
    for (int row = 0; row < 3; ++row) {
      const auto rr = static_cast<std::size_t>(row);
      const double d1 = (p1[rr] - m1[rr]) / (2.0 * h);
      const double d2 = (p2[rr] - m2[rr]) / (4.0 * h);
      out.d[rr][static_cast<std::size_t>(i)] = (4.0 * d1 - d2) / 3.0;
    }
  }
  out.T_a = out.d[0][0];
  return out;
}

ParamDerivatives d_params_exact(const WaveParams& p, int nodes) {
  const OrbitGradients g = orbit_gradients(orbit_of(p), nodes);
  Eigen::Matrix3d K;
  Eigen::Matrix3d G;
  for (int j = 0; j < 3; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    K(0, j) = g.T.grad[jj];
    K(1, j) = g.M.grad[jj];
    K(2, j) = g.P.grad[jj];
    G(0, j) = g.a.grad[jj];
    G(1, j) = g.E.grad[jj];
    G(2, j) = j == 2 ? 1.0 : 0.0;
  }
  const Eigen::Matrix3d D = K * G.inverse();
  ParamDerivatives out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = D(i, j);
  out.T_a = out.d[0][0];
  return out;
}

}  // namespace chm
