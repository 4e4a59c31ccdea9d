#include <cmath>
#include <numbers>

#include "chm/error.hpp"
#include "chm/quadrature.hpp"
#include "chm/sampling.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chm;
using std::numbers::pi;

namespace {

std::vector<WaveParams> mid_region() {
  std::vector<WaveParams> v;
  for (double c : {1.0, 2.0, 3.0})
    for (double alpha : {0.3, 0.6})
      for (double tau : {0.3, 0.6}) v.push_back(interior_params(c, alpha, tau));
  return v;
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("period against ODE shooting") {
    const WaveParams p{2.0, 0.3, 3.0};
    const double T = period(p);
    CHECK(T > 0.0);
    const double Tref = oracle::shooting_period(p.a, p.E, p.c, turning_points(p).phi_max);
    CHECK(T == doctest::Approx(Tref).epsilon(1e-9));
    const WaveParams q = interior_params(1.0, 0.7, 0.9);
    CHECK(period(q) == doctest::Approx(oracle::shooting_period(q.a, q.E, q.c, turning_points(q).phi_max)).epsilon(1e-8));
  }

  TEST_CASE("harmonic limit of the period and functionals") {
    const WaveParams p{2.0, 1e-6, 3.0};
    const WaveFunctionals f = functionals(p);
    const double T0 = 2 * pi / std::sqrt(3.0);
    CHECK(f.T == doctest::Approx(T0).epsilon(1e-4));
    CHECK(f.M == doctest::Approx(T0 * 2.0).epsilon(1e-4));
    CHECK(f.P == doctest::Approx(T0 * 2.0).epsilon(1e-4));
  }

  TEST_CASE("node doubling changes nothing beyond 1e-10") {
    for (const WaveParams& p : mid_region()) {
      for (int m : {64, 128}) {
        const WaveFunctionals a = functionals(p, m), b = functionals(p, 2 * m);
        CHECK(std::abs(a.T - b.T) < 1e-10 * b.T);
        CHECK(std::abs(a.M - b.M) < 1e-10 * b.M);
        CHECK(std::abs(a.P - b.P) < 1e-10 * b.P);
        CHECK(std::abs(a.F - b.F) < 1e-10 * std::abs(b.F));
      }
    }
  }

  TEST_CASE("mass is positive and equals the integral of a/(c - phi)^2") {
    for (const WaveParams& p : mid_region()) {
      const WaveFunctionals f = functionals(p);
      CHECK(f.M > 0.0);
      const WaveProfile w = profile(p);
      std::vector<double> g(w.phi.size());
      for (std::size_t j = 0; j < g.size(); ++j) g[j] = p.a / ((p.c - w.phi[j]) * (p.c - w.phi[j]));
      CHECK(f.T * oracle::mean(g) == doctest::Approx(f.M).epsilon(1e-8));
    }
  }

  TEST_CASE("functionals agree with trapezoid sums of the profile") {
    for (const WaveParams& p : mid_region()) {
      const WaveFunctionals f = functionals(p);
      const WaveProfile w = profile(p);
      std::vector<double> m(w.phi.size()), pp(w.phi.size()), ff(w.phi.size());
      for (std::size_t j = 0; j < m.size(); ++j) {
        const double de = w.k * w.dphi[j];
        m[j] = w.phi[j];
        pp[j] = 0.5 * (w.phi[j] * w.phi[j] + de * de);
        ff[j] = 0.5 * (w.phi[j] * w.phi[j] * w.phi[j] + w.phi[j] * de * de);
      }
      CHECK(f.T * oracle::mean(m) == doctest::Approx(f.M).epsilon(1e-8));
      CHECK(f.T * oracle::mean(pp) == doctest::Approx(f.P).epsilon(1e-8));
      CHECK(f.T * oracle::mean(ff) == doctest::Approx(f.F).epsilon(1e-8));
      CHECK(f.M_mean == doctest::Approx(f.M / f.T).epsilon(1e-14));
      CHECK(f.action == doctest::Approx(p.c * f.P - f.F - p.E * f.M).epsilon(1e-12));
    }
  }

  TEST_CASE("profile of (2, 0.3, 3)") {
    const WaveParams p{2.0, 0.3, 3.0};
    const WaveProfile w = profile(p, 256);
    const TurningPoints tp = turning_points(p);
    const int n = w.size();
    CHECK(n == 256);
    CHECK(w.profile_residual < 1e-8);
    CHECK(w.quadrature_residual < 1e-8);
    CHECK_FALSE(w.under_resolved);
    CHECK(w.phi[0] == doctest::Approx(tp.phi_max).epsilon(1e-12));
    CHECK(w.phi[n / 2] == doctest::Approx(tp.phi_min).epsilon(1e-10));
    double hi = -1e300, lo = 1e300;
    for (int j = 0; j < n; ++j) {
      hi = std::max(hi, w.phi[j]);
      lo = std::min(lo, w.phi[j]);
      if (j > 0) CHECK(std::abs(w.phi[j] - w.phi[n - j]) < 1e-12);
      if (j > 0 && j < n / 2) CHECK(w.dphi[j] < 0.0);
      if (j > n / 2) CHECK(w.dphi[j] > 0.0);
    }
    CHECK(hi < p.c);
    CHECK(hi == doctest::Approx(tp.phi_max).epsilon(1e-12));
    // quadrature identity k^2 phi'^2/2 = E - V at every node
    for (int j = 0; j < n; ++j) {
      const double lhs = 0.5 * w.k * w.k * w.dphi[j] * w.dphi[j];
      CHECK(std::abs(lhs - (p.E - oracle::V(w.phi[j], p.a, p.c))) < 1e-9);
    }
    // the profile equation evaluated from scratch
    for (int j = 0; j < n; ++j) {
      const double k2 = w.k * w.k;
      const double r = -k2 * (p.c - w.phi[j]) * w.d2phi[j] + p.c * w.phi[j] - 1.5 * w.phi[j] * w.phi[j] +
                       0.5 * k2 * w.dphi[j] * w.dphi[j] - p.E;
      CHECK(std::abs(r) < 1e-8);
    }
  }

  TEST_CASE("spectral decay of mid-region profiles") {
    for (const WaveParams& p : mid_region()) {
      const WaveProfile w = profile(p, 256);
      CHECK(std::abs(w.mode(64)) < 1e-12 * std::abs(w.mode(1)));
      CHECK(w.tail_ratio(64) < 1e-12);
    }
  }

  TEST_CASE("constant profile at the lower edge") {
    const PotentialShape s = critical_points(2.0, 3.0);
    const WaveProfile w = profile({2.0, s.V2 + 1e-7, 3.0}, 64);
    for (std::size_t j = 0; j < w.phi.size(); ++j) {
      CHECK(std::abs(w.phi[j] - s.phi2) < 1e-3);
      CHECK(std::abs(w.dphi[j]) < 1e-2);
    }
  }

  TEST_CASE("resolved profile doubles the grid when needed") {
    const WaveParams p = interior_params(1.0, 0.5, 0.999);
    const WaveProfile w = resolved_profile(p, 64);
    CHECK(w.profile_residual < kProfileTolerance);
    CHECK(w.size() >= 64);
  }

  TEST_CASE("grid size validation") {
    CHECK_THROWS_AS(profile({2.0, 0.3, 3.0}, 100), Error);
    CHECK_THROWS_AS(profile({2.0, 0.3, 3.0}, 32), Error);
  }

  TEST_CASE("period derivative signs") {
    const double c = 2.0;
    for (double e : {0.1, 0.4, 0.7}) {
      const double E = e * c * c / 6.0;
      const auto [lo, hi] = a_range_for_energy(E, c);
      for (double f : {0.25, 0.5, 0.75}) {
        const WaveParams p{lo + f * (hi - lo), E, c};
        CHECK(d_params(p).T_a < 0.0);
      }
    }
    const double Etop = -(1.0 - std::sqrt(2.0 / 3.0)) * c * c;
    for (double e : {0.1, 0.5, 0.9}) {
      const double E = -0.5 * c * c + e * (Etop + 0.5 * c * c);
      const auto [lo, hi] = a_range_for_energy(E, c);
      for (double f : {0.25, 0.5, 0.75}) {
        const WaveParams p{lo + f * (hi - lo), E, c};
        CHECK(d_params(p).T_a > 0.0);
      }
    }
  }

  TEST_CASE("finite-difference derivatives: step halving and exact gradients") {
    for (const WaveParams& p : {WaveParams{2.0, 0.3, 3.0}, interior_params(1.0, 0.5, 0.5)}) {
      const ParamDerivatives a = d_params(p, 1e-5), b = d_params(p, 5e-6), e = d_params_exact(p);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          const double s = std::max(std::abs(b.d[i][j]), 1e-3);
          CHECK(std::abs(a.d[i][j] - b.d[i][j]) < 1e-6 * s);
          CHECK(std::abs(e.d[i][j] - b.d[i][j]) < 1e-6 * s);
        }
      CHECK(e.T_a == doctest::Approx(e.d[0][0]));
    }
  }

  TEST_CASE("stencil leaving the region") {
    const PotentialShape s = critical_points(2.0, 3.0);
    try {
      (void)d_params({2.0, s.V2 + 1e-7, 3.0}, 1e-5);
      FAIL("expected StencilLeavesRegion");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StencilLeavesRegion);
    }
  }

  TEST_CASE("averaged fluxes of a profile match the orbit quadrature") {
    const Orbit o = orbit_of({2.0, 0.3, 3.0});
    const AveragedFluxes q = orbit_fluxes(o);
    const AveragedFluxes g = averaged_fluxes(orbit_profile(o, 256));
    CHECK(g.qM == doctest::Approx(q.qM).epsilon(1e-10));
    CHECK(g.qP == doctest::Approx(q.qP).epsilon(1e-9));
  }

  TEST_CASE("exact orbit gradients against central differences") {
    const Orbit o = orbit_of(interior_params(2.0, 0.4, 0.6));
    const OrbitGradients g = orbit_gradients(o);
    const OrbitCoords y = OrbitCoords::of(o);
    const double h = 1e-6;
    for (std::size_t j = 0; j < 3; ++j) {
      auto y1 = y.as_array(), y0 = y.as_array();
      y1[j] += h;
      y0[j] -= h;
      const WaveFunctionals f1 = orbit_functionals(OrbitCoords::from_array(y1).orbit());
      const WaveFunctionals f0 = orbit_functionals(OrbitCoords::from_array(y0).orbit());
      const AveragedFluxes q1 = orbit_fluxes(OrbitCoords::from_array(y1).orbit());
      const AveragedFluxes q0 = orbit_fluxes(OrbitCoords::from_array(y0).orbit());
      CHECK(g.T.grad[j] == doctest::Approx((f1.T - f0.T) / (2 * h)).epsilon(1e-6));
      CHECK(g.P_mean.grad[j] == doctest::Approx((f1.P_mean - f0.P_mean) / (2 * h)).epsilon(1e-6));
      CHECK(g.qP.grad[j] == doctest::Approx((q1.qP - q0.qP) / (2 * h)).epsilon(1e-6));
    }
  }
}
