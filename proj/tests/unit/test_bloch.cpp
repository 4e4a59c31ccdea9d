#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "chm/bloch.hpp"
#include "chm/error.hpp"
#include "chm/sampling.hpp"
#include "chm/stokes.hpp"
#include "chm/whitham.hpp"
#include "doctest.h"

using namespace chm;
using std::numbers::pi;

namespace {

struct Setup {
  WaveProfile w;
  Chart ch;
  ProfilePartials pp;
  OperatorSet ops;
  KernelBasis b;
  Eigen::Matrix3cd d0;
};

Setup setup(const WaveParams& p, int N = 64, int n = 256) {
  Setup s;
  s.w = profile(p, n);
  s.ch = chart(p);
  s.pp = profile_partials(s.w, s.ch, PartialsMethod::LinearSolve, N);
  s.ops = assemble_all(s.w, N);
  s.b = kernel_basis(s.w, s.ch, s.pp, s.ops);
  s.d0 = d0_matrix(s.b, s.ops, s.ch, s.w);
  return s;
}

const WaveParams kMid{2.0, 0.3, 3.0};

double rel_max(const Mat3& W, const Eigen::Matrix3cd& D, double c) {
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double w = W[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      diff = std::max(diff, std::abs(w - (D(i, j) - (i == j ? c : 0.0))));
      scale = std::max(scale, std::abs(w));
    }
  return diff / scale;
}

}  // namespace

TEST_SUITE("bloch") {
  TEST_CASE("operator symmetries and product identities") {
    const WaveProfile w = profile(kMid);
    const OperatorSet s = assemble_all(w, 32);
    const double n0 = s.L0.norm();
    CHECK((s.L0 - s.L0.adjoint()).norm() < 1e-10 * n0);
    CHECK((s.J0 + s.J0.adjoint()).norm() < 1e-10 * s.J0.norm());
    CHECK((s.A0 - s.J0 * s.L0).norm() == 0.0);
    CHECK((assemble(w, OperatorLabel::A1, 32).mat - (s.J0 * s.L1 + s.J1 * s.L0)).norm() < 1e-12 * s.A1.norm());
    CHECK((assemble(w, OperatorLabel::A2, 32).mat - s.A2).norm() < 1e-12 * s.A2.norm());
    const Eigen::VectorXcd one = Eigen::VectorXcd::Unit(65, 32);
    CHECK((s.J0 * one).norm() == 0.0);
  }

  TEST_CASE("Bloch operator expands in powers of i k xi") {
    const WaveProfile w = profile(kMid);
    const OperatorSet s = assemble_all(w, 32);
    double prev = 0.0;
    for (double xi : {0.02, 0.01, 0.005}) {
      const Eigen::MatrixXcd A = assemble(w, OperatorLabel::Axi, 32, xi).mat;
      const std::complex<double> e(0.0, w.k * xi);
      const double r = (A - s.A0 - e * s.A1 - e * e * s.A2).norm();
      if (prev > 0.0) CHECK(prev / r == doctest::Approx(8.0).epsilon(0.05));
      prev = r;
    }
  }

  TEST_CASE("constant state: diagonal L0 with the closed-form symbol") {
    const double M0 = 0.4, k = 0.7, c = 1.3;
    WaveProfile w;
    w.k = k;
    w.params = {0.0, 0.0, c};
    const int n = 64;
    w.phi.assign(n, M0);
    w.dphi.assign(n, 0.0);
    w.d2phi.assign(n, 0.0);
    const int N = 8;
    const Eigen::MatrixXcd L0 = assemble(w, OperatorLabel::L0, N).mat;
    const Eigen::MatrixXcd A0 = assemble(w, OperatorLabel::A0, N).mat;
    for (int i = -N; i <= N; ++i)
      for (int j = -N; j <= N; ++j) {
        const std::complex<double> v = L0(i + N, j + N);
        if (i != j) {
          CHECK(std::abs(v) < 1e-14);
          continue;
        }
        const double q = 2 * pi * i;
        const double sym = k * k * (c - M0) * q * q + (c - 3 * M0);
        CHECK(std::abs(v - sym) < 1e-12 * std::max(1.0, std::abs(sym)));
        const std::complex<double> a = A0(i + N, j + N);
        CHECK(std::abs(a.real()) < 1e-12 * std::max(1.0, std::abs(a)));
        const double expect = k * q / (1 + k * k * q * q) * sym;
        CHECK(a.imag() == doctest::Approx(expect).epsilon(1e-12));
      }
  }

  TEST_CASE("L0 annihilates phi'") {
    const WaveProfile w = profile(kMid);
    const OperatorSet s = assemble_all(w, 64);
    const Eigen::VectorXcd d = grid_to_modes(w.dphi, 64);
    const Eigen::VectorXcd r = Eigen::VectorXcd::Random(129);
    CHECK((s.L0 * d).norm() / d.norm() < 1e-6 * (s.L0 * r).norm() / r.norm());
  }

  TEST_CASE("truncation and grid guards") {
    const WaveProfile w = profile(kMid, 256);
    CHECK_THROWS_AS(assemble(w, OperatorLabel::L0, 65), Error);
    const WaveProfile steep = profile(interior_params(1.0, 0.9, 0.999), 64);
    try {
      (void)assemble(steep, OperatorLabel::L0, 4);
      FAIL("expected TruncationTooSmall");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TruncationTooSmall);
    }
    CHECK_THROWS_AS(assemble(w, OperatorLabel::Axi, 16), Error);
  }

  TEST_CASE("kernel basis of a mid-region wave") {
    const Setup s = setup(kMid);
    const double k = s.w.k;
    CHECK((s.b.gram - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() < 1e-6);
    const auto& A0 = s.ops.A0;
    CHECK((A0 * s.b.Phi1).norm() < 1e-6 * s.b.Phi1.norm());
    CHECK((A0 * s.b.Phi2 + k * s.ch.c_partials[1] * s.b.Phi1).norm() < 1e-6 * s.b.Phi2.norm());
    CHECK((A0 * s.b.Phi3 + k * s.ch.c_partials[2] * s.b.Phi1).norm() < 1e-6 * s.b.Phi3.norm());
    const Eigen::MatrixXcd AH = A0.adjoint();
    CHECK((AH * s.b.Psi2).norm() < 1e-6 * s.b.Psi2.norm() * A0.norm());
    CHECK((AH * s.b.Psi3).norm() < 1e-6 * s.b.Psi3.norm() * A0.norm());
    // A0^H Psi1 lies in span{Psi2, Psi3}
    Eigen::MatrixXcd S(A0.rows(), 2);
    S << s.b.Psi2, s.b.Psi3;
    const Eigen::VectorXcd v = AH * s.b.Psi1;
    const Eigen::VectorXcd proj = S * S.colPivHouseholderQr().solve(v);
    CHECK((v - proj).norm() < 1e-6 * v.norm());
    // beta is odd: its cosine part vanishes
    const int N = s.ops.N;
    double even = 0.0;
    for (int n = 0; n <= N; ++n) even = std::max(even, std::abs(s.b.Psi1(N + n) + s.b.Psi1(N - n)));
    CHECK(even < 1e-8 * s.b.Psi1.norm());
  }

  TEST_CASE("geometric kernel of dimension two inside an algebraic kernel of dimension three") {
    const Setup s = setup(kMid, 32, 128);
    CHECK(s.b.nullity == 2);
    const double smax = s.b.singular_values(s.b.singular_values.size() - 1);
    CHECK(s.b.singular_values(2) > 1e-3 * smax);
    const Eigen::MatrixXcd A2 = s.ops.A0 * s.ops.A0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A2);
    const Eigen::VectorXd sv = svd.singularValues();
    int null2 = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) < 1e-8 * sv(0)) ++null2;
    CHECK(null2 == 3);
  }

  TEST_CASE("D0 first row and the Whitham identity") {
    for (const WaveParams& p : {kMid, interior_params(1.0, 0.4, 0.6), interior_params(3.0, 0.7, 0.3)}) {
      const Setup s = setup(p);
      const double k = s.w.k;
      for (int j = 0; j < 3; ++j) CHECK(s.d0(0, j).real() == doctest::Approx(-k * s.ch.c_partials[static_cast<std::size_t>(j)]));
      CHECK(s.d0.imag().cwiseAbs().maxCoeff() < 1e-8 * s.d0.cwiseAbs().maxCoeff());
      const WhithamMatrix W = whitham_matrix(p);
      CHECK(rel_max(W.W, s.d0, p.c) < 1e-4);
      const WhithamMatrix Wfd = whitham_matrix(p, {WhithamMethod::FiniteDifference});
      CHECK(rel_max(Wfd.W, s.d0, p.c) < 1e-4);
    }
  }

  TEST_CASE("row-2 identity against differences of the mean mass flux") {
    const Setup s = setup(kMid);
    const Vec3 kmp = s.ch.kmp;
    const double h = 1e-4 * kmp[1];
    auto qM = [&](double dM) {
      Vec3 t = kmp;
      t[1] += dM;
      return orbit_fluxes(orbit_from_kmp(t, s.ch.orbit)).qM;
    };
    const double dqM = (8 * (qM(h) - qM(-h)) - (qM(2 * h) - qM(-2 * h))) / (12 * h);
    const std::complex<double> lhs = s.b.Psi2.dot(s.ops.A1 * s.b.Phi2) - kMid.c;
    CHECK(lhs.real() == doctest::Approx(dqM).epsilon(1e-6));
  }

  TEST_CASE("D0 is resolved at N = 64") {
    const Setup a = setup(kMid, 64, 256);
    const Setup b = setup(kMid, 128, 512);
    CHECK((a.d0 - b.d0).cwiseAbs().maxCoeff() < 1e-6 * b.d0.cwiseAbs().maxCoeff());
  }

  TEST_CASE("small Bloch eigenvalues approach ik xi eig(D0)") {
    const Setup s = setup(kMid);
    const SpectralCurves sc = bloch_curves(s.w, s.d0, 64, default_xi_list());
    CHECK(sc.observed_order >= 0.9);
    for (int j = 0; j < 3; ++j) {
      const double scale = std::abs(sc.d0_eigs[static_cast<std::size_t>(j)]);
      CHECK(std::abs(sc.mu_limit[static_cast<std::size_t>(j)] - sc.d0_eigs[static_cast<std::size_t>(j)]) < 1e-4 * scale);
    }
    for (std::size_t i = 1; i < sc.errors.size(); ++i) CHECK(sc.errors[i] < sc.errors[i - 1]);
    CHECK(modulational_verdict(sc) == Verdict::Stable);
  }

  TEST_CASE("zero is a triple eigenvalue of A0") {
    const Setup s = setup(kMid, 32, 128);
    const Eigen::VectorXcd ev = bloch_spectrum(s.w, 32, 0.0);
    const double scale = s.ops.A0.norm();
    int near_zero = 0;
    for (int i = 0; i < ev.size(); ++i)
      if (std::abs(ev(i)) < 1e-4 * scale) ++near_zero;
    CHECK(near_zero == 3);
  }

  TEST_CASE("spectra are symmetric about the imaginary axis") {
    const WaveProfile w = profile(kMid, 128);
    for (double xi : {0.01, 0.05}) {
      const SymmetryReport r = spectral_symmetry(w, 32, xi);
      CHECK(r.reflection < 1e-8 * r.norm);
      CHECK(r.pairing < 1e-8 * r.norm);
    }
  }

  TEST_CASE("verdicts") {
    CHECK(modulational_verdict({std::complex<double>(0, 0), {0, 1}, {0, -1}}) == Verdict::Unstable);
    const double ks = critical_frequency();
    const auto e = stokes_whitham_eigs({ks, 1.0, 1e-3});
    CHECK(modulational_verdict({std::complex<double>(e[0]), std::complex<double>(e[1]), std::complex<double>(e[2])}) ==
          Verdict::Degenerate);
    const StokesWave sw = stokes_wave({1.0, 1.0, 1e-3});
    WaveProfile w = orbit_profile(sw.orbit, 256);
    const Chart ch = orbit_chart(sw.orbit);
    const ProfilePartials pp = profile_partials(w, ch, PartialsMethod::LinearSolve, 64);
    const OperatorSet ops = assemble_all(w, 64);
    const KernelBasis b = kernel_basis(w, ch, pp, ops);
    CHECK(modulational_verdict(eigenvalues3(d0_matrix(b, ops, ch, w))) == Verdict::Stable);
  }

  TEST_CASE("Hausdorff distance") {
    Eigen::VectorXcd a(2), b(3);
    a << 0.0, 1.0;
    b << 0.0, 1.0, std::complex<double>(0, 3);
    CHECK(hausdorff(a, b) == doctest::Approx(3.0));
    CHECK(hausdorff(a, a) == 0.0);
  }
}
