#include <cmath>
#include <numbers>

#include "chm/error.hpp"
#include "chm/stokes.hpp"
#include "doctest.h"

using namespace chm;
using std::numbers::pi;

namespace {

double max_profile_residual(const WaveProfile& w) {
  const double c = w.params.c, E = w.params.E, k2 = w.k * w.k;
  double r = 0.0;
  for (std::size_t j = 0; j < w.phi.size(); ++j) {
    const double phi = w.phi[j];
    r = std::max(r, std::abs(-k2 * (c - phi) * w.d2phi[j] + c * phi - 1.5 * phi * phi +
                             0.5 * k2 * w.dphi[j] * w.dphi[j] - E));
  }
  return r;
}

}  // namespace

TEST_SUITE("stokes") {
  TEST_CASE("closed-form coefficients") {
    const double x = 4 * pi * pi;
    CHECK(omega0(1.0, 1.0) == doctest::Approx((3 + x) / (1 + x)).epsilon(1e-14));
    CHECK(std::abs(omega0(1.0, 1.0) - 1.049407) < 5e-6);
    CHECK(omega2(1.0, 1.0) == doctest::Approx(7.7819).epsilon(1e-4));
    CHECK(psi2_coefficient(1.0, 1.0) == doctest::Approx((1 + x) * (1 + x) / (32 * pi * pi)).epsilon(1e-14));
    CHECK(psi2_coefficient(1.0, 1.0) == doctest::Approx(5.1880).epsilon(1e-4));
    CHECK(domega0_dk(1.0, 1.0) == doctest::Approx(0.95302).epsilon(1e-5));
    for (double k : {0.1, 0.5, 2.0}) {
      CHECK(omega0(k, 2.0) == doctest::Approx(2.0 * omega0(k, 1.0)).epsilon(1e-14));
      const double h = 1e-6;
      CHECK(domega0_dk(k, 1.3) == doctest::Approx((omega0(k + h, 1.3) - omega0(k - h, 1.3)) / (2 * h)).epsilon(1e-8));
    }
    CHECK(omega0(1e-6, 1.0) / 1e-6 == doctest::Approx(3.0).epsilon(1e-9));
  }

  TEST_CASE("omega0 increases with k") {
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double w = omega0(0.01 * i, 1.0);
      CHECK(w > prev);
      prev = w;
    }
  }

  TEST_CASE("critical frequency and the gap coefficient") {
    const double ks = critical_frequency();
    CHECK(ks == doctest::Approx(std::sqrt(3.0) / (2 * pi)).epsilon(1e-15));
    CHECK(ks == doctest::Approx(0.2756644).epsilon(1e-7));
    CHECK(std::abs(gap_coefficient(ks)) < 1e-15);
    CHECK(gap_coefficient(0.9 * ks) > 0.0);
    CHECK(gap_coefficient(1.1 * ks) < 0.0);
  }

  TEST_CASE("linearised Whitham eigenvalues") {
    const StokesParams p{0.6, 1.5, 1e-3};
    const auto e = stokes_whitham_eigs(p);
    CHECK(e[0] == -4.5);
    CHECK(e[1] - e[2] == doctest::Approx(2 * gap_coefficient(0.6) * 1e-3).epsilon(1e-10));
    CHECK(0.5 * (e[1] + e[2]) == doctest::Approx(-domega0_dk(0.6, 1.5)).epsilon(1e-14));
  }

  TEST_CASE("momentum bridge inverts") {
    for (double A : {0.0, 1e-4, 3e-3}) {
      const double P = stokes_momentum(0.7, 1.2, A);
      CHECK(P == doctest::Approx(0.72 + (1 + 4 * 0.49 * pi * pi) / 4 * A * A).epsilon(1e-15));
      CHECK(stokes_amplitude(0.7, 1.2, P) == doctest::Approx(A).epsilon(1e-9));
    }
  }

  TEST_CASE("expansion profile") {
    const WaveProfile w0 = stokes_profile({1.0, 1.0, 0.0}, 64);
    for (double v : w0.phi) CHECK(v == 1.0);
    const double r1 = max_profile_residual(stokes_profile({1.0, 1.0, 4e-3}, 128));
    const double r2 = max_profile_residual(stokes_profile({1.0, 1.0, 2e-3}, 128));
    CHECK(r1 / r2 == doctest::Approx(8.0).epsilon(0.15));
    try {
      (void)stokes_profile({1.0, 1.0, 0.02});
      FAIL("expected AmplitudeTooLarge");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AmplitudeTooLarge);
    }
  }

  TEST_CASE("exact Stokes wave against the expansion") {
    double prev = 0.0;
    for (double A : {1e-3, 5e-4}) {
      const StokesParams p{1.0, 1.0, A};
      const StokesWave sw = stokes_wave(p);
      CHECK(sw.kmp[0] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(sw.kmp[1] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(sw.A == doctest::Approx(A).epsilon(1e-9));
      CHECK(sw.kmp[2] == doctest::Approx(stokes_momentum(1.0, 1.0, A)).epsilon(1e-9));
      const WaveProfile w = orbit_profile(sw.orbit, 128);
      const WaveProfile e = stokes_profile(p, 128);
      double d = 0.0;
      for (std::size_t j = 0; j < w.phi.size(); ++j) d = std::max(d, std::abs(w.phi[j] - e.phi[j]));
      CHECK(d < 100 * A * A * A);
      if (prev > 0.0) CHECK(prev / d == doctest::Approx(8.0).epsilon(0.15));
      prev = d;
    }
  }
}
