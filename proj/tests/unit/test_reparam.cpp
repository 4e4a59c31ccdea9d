#include <Eigen/Dense>
#include <cmath>

#include "chm/bloch.hpp"
#include "chm/error.hpp"
#include "chm/reparam.hpp"
#include "chm/sampling.hpp"
#include "chm/stokes.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chm;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return oracle::mean(p);
}

std::vector<WaveParams> samples() {
  return {WaveParams{2.0, 0.3, 3.0}, interior_params(1.0, 0.3, 0.4), interior_params(2.0, 0.7, 0.6),
          interior_params(3.0, 0.5, 0.2)};
}

}  // namespace

TEST_SUITE("reparam") {
  TEST_CASE("J Jinv = I and c-partials are the last row of Jinv") {
    for (const WaveParams& p : samples()) {
      const Chart ch = chart(p);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          double s = 0.0;
          for (std::size_t l = 0; l < 3; ++l) s += ch.J[i][l] * ch.Jinv[l][j];
          CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(ch.c_partials[j] == ch.Jinv[2][j]);
        CHECK(ch.E_partials[j] == ch.Jinv[1][j]);
      }
      CHECK(std::abs(ch.det_J) > 0.0);
    }
  }

  TEST_CASE("chart Jacobian matches differences of to_kmp") {
    const WaveParams p{2.0, 0.3, 3.0};
    const Chart ch = chart(p);
    const double h = 1e-6;
    const std::array<WaveParams, 3> dirs{WaveParams{h, 0, 0}, WaveParams{0, h, 0}, WaveParams{0, 0, h}};
    for (std::size_t j = 0; j < 3; ++j) {
      const WaveParams p1{p.a + dirs[j].a, p.E + dirs[j].E, p.c + dirs[j].c};
      const WaveParams p0{p.a - dirs[j].a, p.E - dirs[j].E, p.c - dirs[j].c};
      const Vec3 f1 = to_kmp(p1), f0 = to_kmp(p0);
      for (std::size_t i = 0; i < 3; ++i)
        CHECK(ch.J[i][j] == doctest::Approx((f1[i] - f0[i]) / (2 * h)).epsilon(1e-6));
    }
  }

  TEST_CASE("round trip through (k, M, P)") {
    for (const WaveParams& p : samples()) {
      const WaveParams q = from_kmp(to_kmp(p), p);
      CHECK(q.a == doctest::Approx(p.a).epsilon(1e-9));
      CHECK(q.E == doctest::Approx(p.E).epsilon(1e-9));
      CHECK(q.c == doctest::Approx(p.c).epsilon(1e-9));
    }
  }

  TEST_CASE("perturbed frequency converges in at most five iterations") {
    for (const WaveParams& p : samples()) {
      Vec3 t = to_kmp(p);
      t[0] += 1e-4;
      NewtonReport rep;
      const WaveParams q = from_kmp(t, p, &rep);
      CHECK(rep.iterations <= 5);
      CHECK(rep.residual < 1e-10);
      const Vec3 back = to_kmp(q);
      CHECK(back[0] == doctest::Approx(t[0]).epsilon(1e-10));
    }
  }

  TEST_CASE("targets outside the image diverge") {
    const WaveParams near_solitary = interior_params(2.0, 0.5, 0.999);
    const Vec3 t0 = to_kmp(near_solitary);
    const Vec3 t{t0[0], t0[1], 0.5 * t0[1] * t0[1] - 0.1};  // P < M^2/2 is impossible
    try {
      (void)from_kmp(t, near_solitary);
      FAIL("expected NewtonDivergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NewtonDivergence);
    }
  }

  TEST_CASE("chart stays invertible as the amplitude vanishes") {
    // In the period-mean chart the determinant relative to ||J||^3 stays of
    // order one all the way down to a constant state.
    for (double tau : {1e-2, 1e-4, 1e-6}) {
      const Chart ch = chart(interior_params(2.0, 0.5, tau));
      double n2 = 0.0;
      for (const auto& r : ch.J)
        for (double x : r) n2 += x * x;
      CHECK(std::abs(ch.det_J) / std::pow(n2, 1.5) > 1e-3);
    }
  }

  TEST_CASE("Stokes regime c_k against d(omega0/k)/dk") {
    const StokesWave sw = stokes_wave({1.0, 1.0, 1e-4});
    const Chart ch = orbit_chart(sw.orbit);
    const double k = sw.kmp[0], M = sw.kmp[1];
    const double dck = (domega0_dk(k, M) - omega0(k, M) / k) / k;
    CHECK(ch.c_partials[0] == doctest::Approx(dck).epsilon(1e-4));
  }

  TEST_CASE("profile partials: coordinate identities") {
    for (const WaveParams& p : samples()) {
      const WaveProfile w = profile(p);
      const Chart ch = chart(p);
      const ProfilePartials pp = profile_partials(w, ch);
      std::vector<double> one(w.phi.size(), 1.0), psi3(w.phi.size());
      for (std::size_t j = 0; j < psi3.size(); ++j) psi3[j] = w.phi[j] - w.k * w.k * w.d2phi[j];
      CHECK(dot(one, pp.phi_M) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(dot(one, pp.phi_P)) < 1e-6);
      CHECK(std::abs(dot(one, pp.phi_k)) < 1e-6);
      CHECK(dot(psi3, pp.phi_P) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(dot(psi3, pp.phi_M)) < 1e-6);
      CHECK(dot(psi3, pp.phi_k) == doctest::Approx(-w.k * dot(w.dphi, w.dphi)).epsilon(1e-6));
      CHECK(std::abs(pp.phi_M[1] - pp.phi_M[w.phi.size() - 1]) < 1e-10);
    }
  }

  TEST_CASE("linear-solve and finite-difference partials agree") {
    for (const WaveParams& p : {WaveParams{2.0, 0.3, 3.0}, interior_params(1.0, 0.5, 0.5)}) {
      const WaveProfile w = profile(p);
      const Chart ch = chart(p);
      const ProfilePartials a = profile_partials(w, ch, PartialsMethod::LinearSolve);
      const ProfilePartials b = profile_partials(w, ch, PartialsMethod::FiniteDifference);
      auto rel = [](const std::vector<double>& x, const std::vector<double>& y) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          num = std::max(num, std::abs(x[i] - y[i]));
          den = std::max(den, std::abs(y[i]));
        }
        return num / den;
      };
      CHECK(rel(a.phi_k, b.phi_k) < 1e-5);
      CHECK(rel(a.phi_M, b.phi_M) < 1e-5);
      CHECK(rel(a.phi_P, b.phi_P) < 1e-5);
    }
  }

  TEST_CASE("A0 maps phi_M and phi_P onto multiples of phi'") {
    const WaveParams p{2.0, 0.3, 3.0};
    const WaveProfile w = profile(p);
    const Chart ch = chart(p);
    const ProfilePartials pp = profile_partials(w, ch);
    const int N = 64;
    const FourierOperator A0 = assemble(w, OperatorLabel::A0, N);
    const Eigen::VectorXcd d = grid_to_modes(w.dphi, N);
    for (int i = 1; i < 3; ++i) {
      const Eigen::VectorXcd v = grid_to_modes(i == 1 ? pp.phi_M : pp.phi_P, N);
      const Eigen::VectorXcd r = A0.mat * v + w.k * ch.c_partials[static_cast<std::size_t>(i)] * d;
      CHECK(r.norm() < 1e-6 * (A0.mat * v).norm() + 1e-6 * v.norm());
    }
  }

  TEST_CASE("kmp steps keep P - M^2/2 positive") {
    const Vec3 kmp{0.5, 1.0, 0.5 + 1e-6};
    const Vec3 h = kmp_steps(kmp, 1e-3);
    const double dP = kmp[2] - 0.5 * kmp[1] * kmp[1];
    CHECK(h[1] <= 0.05 * dP);
    CHECK(h[2] <= 0.05 * dP);
    CHECK(h[0] == doctest::Approx(5e-4));
  }
}
