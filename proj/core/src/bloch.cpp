#include "chm/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "chm/error.hpp"
#include "chm/spectral.hpp"

namespace chm {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using std::numbers::pi;

Eigen::MatrixXcd toeplitz(const std::vector<double>& f, int N) {
  const std::vector<cplx> fh = dft(f);
  const int dim = 2 * N + 1;
  std::vector<cplx> band(static_cast<std::size_t>(4 * N + 1));
  for (int j = -2 * N; j <= 2 * N; ++j) band[static_cast<std::size_t>(j + 2 * N)] = mode_coefficient(fh, j);
  MatrixXcd T(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) T(i, j) = band[static_cast<std::size_t>(i - j + 2 * N)];
  return T;
}

struct Pieces {
  int N = 0;
  double k = 0.0;
  VectorXcd d;  // symbol of d/d theta (+ i xi)
  Eigen::VectorXd g;  // symbol of (1 - k^2 d^2)^-1
  MatrixXcd U;  // multiplication by c - phi
  MatrixXcd Q;  // multiplication by c - 3 phi + k^2 phi''
};

void check_resolution(const WaveProfile& w, int N) {
  if (N < 1) throw Error(ErrorKind::InvalidInput, "Fourier truncation must be positive");
  if (w.size() < 4 * N) {
    throw Error(ErrorKind::InvalidInput, "profile grid must have at least 4N points to resolve the products");
  }
  const double tail = w.tail_ratio(N);
  if (tail > kTruncationTol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "profile modes beyond N = %d carry relative l2 mass %.3e", N, tail);
    throw Error(ErrorKind::TruncationTooSmall, buf);
  }
}

Pieces pieces(const WaveProfile& w, int N, double xi) {
  check_resolution(w, N);
  Pieces p;
  p.N = N;
  p.k = w.k;
  const int dim = 2 * N + 1;
  const double c = w.params.c;
  const double k2 = w.k * w.k;
  p.d.resize(dim);
  p.g.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const double nu = 2.0 * pi * (i - N) + xi;
    p.d(i) = cplx(0.0, nu);
    p.g(i) = 1.0 / (1.0 + k2 * nu * nu);
  }
  std::vector<double> u(w.phi.size());
  std::vector<double> q(w.phi.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    u[j] = c - w.phi[j];
    q[j] = c - 3.0 * w.phi[j] + k2 * w.d2phi[j];
  }
  p.U = toeplitz(u, N);
  p.Q = toeplitz(q, N);
  return p;
}

MatrixXcd build_L0(const Pieces& p) {
  const double k2 = p.k * p.k;
  return -k2 * (p.d.asDiagonal() * p.U * p.d.asDiagonal()) + p.Q;
}

MatrixXcd build_L1(const Pieces& p) {
  return -p.k * (p.d.asDiagonal() * p.U + p.U * p.d.asDiagonal());
}

MatrixXcd build_L2(const Pieces& p) { return -p.U; }

VectorXcd J0_symbol(const Pieces& p) { return p.k * (p.g.cast<cplx>().array() * p.d.array()).matrix(); }

VectorXcd J1_symbol(const Pieces& p) {
  const double k2 = p.k * p.k;
  const auto g = p.g.cast<cplx>().array();
  const auto d = p.d.array();
  return (2.0 * k2 * g * g * d * d + g).matrix();
}

VectorXcd J2_symbol(const Pieces& p) {
  const double k = p.k;
  const auto g = p.g.cast<cplx>().array();
  const auto d = p.d.array();
  return (3.0 * k * g * g * d + 4.0 * k * k * k * g * g * g * d * d * d).matrix();
}

MatrixXcd diag(const VectorXcd& v) { return v.asDiagonal(); }

std::array<cplx, 3> sorted3(std::array<cplx, 3> v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

}  // namespace

std::string_view to_string(OperatorLabel l) noexcept {
  switch (l) {
    case OperatorLabel::L0: return "L0";
    case OperatorLabel::L1: return "L1";
    case OperatorLabel::L2: return "L2";
    case OperatorLabel::J0: return "J0";
    case OperatorLabel::J1: return "J1";
    case OperatorLabel::J2: return "J2";
    case OperatorLabel::A0: return "A0";
    case OperatorLabel::A1: return "A1";
    case OperatorLabel::A2: return "A2";
    case OperatorLabel::Axi: return "Axi";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Degenerate: return "Degenerate";
  }
  return "unknown";
}

FourierOperator assemble(const WaveProfile& w, OperatorLabel label, int N, std::optional<double> xi) {
  if (label == OperatorLabel::Axi && !xi) throw Error(ErrorKind::InvalidInput, "Axi needs a Bloch parameter");
  const bool bloch = label == OperatorLabel::L0 || label == OperatorLabel::J0 || label == OperatorLabel::A0 ||
                     label == OperatorLabel::Axi;
  const double x = (bloch && xi) ? *xi : 0.0;
  const Pieces p = pieces(w, N, x);
  FourierOperator op;
  op.N = N;
  op.label = label;
  op.xi = x;
  switch (label) {
    case OperatorLabel::L0: op.mat = build_L0(p); break;
    case OperatorLabel::L1: op.mat = build_L1(p); break;
    case OperatorLabel::L2: op.mat = build_L2(p); break;
    case OperatorLabel::J0: op.mat = diag(J0_symbol(p)); break;
    case OperatorLabel::J1: op.mat = diag(J1_symbol(p)); break;
    case OperatorLabel::J2: op.mat = diag(J2_symbol(p)); break;
    case OperatorLabel::A0:
    case OperatorLabel::Axi: op.mat = J0_symbol(p).asDiagonal() * build_L0(p); break;
    case OperatorLabel::A1: op.mat = J0_symbol(p).asDiagonal() * build_L1(p) + J1_symbol(p).asDiagonal() * build_L0(p); break;
    case OperatorLabel::A2:
      op.mat = J0_symbol(p).asDiagonal() * build_L2(p) + J1_symbol(p).asDiagonal() * build_L1(p) +
               J2_symbol(p).asDiagonal() * build_L0(p);
      break;
  }
  return op;
}

OperatorSet assemble_all(const WaveProfile& w, int N) {
  const Pieces p = pieces(w, N, 0.0);
  OperatorSet s;
  s.N = N;
  s.D = p.d;
  s.L0 = build_L0(p);
  s.L1 = build_L1(p);
  s.L2 = build_L2(p);
  s.J0 = diag(J0_symbol(p));
  s.J1 = diag(J1_symbol(p));
  s.J2 = diag(J2_symbol(p));
  s.A0 = s.J0 * s.L0;
  s.A1 = s.J0 * s.L1 + s.J1 * s.L0;
  s.A2 = s.J0 * s.L2 + s.J1 * s.L1 + s.J2 * s.L0;
  return s;
}

Eigen::VectorXcd grid_to_modes(const std::vector<double>& f, int N) {
  const std::vector<cplx> fh = dft(f);
  VectorXcd v(2 * N + 1);
  for (int j = -N; j <= N; ++j) v(j + N) = mode_coefficient(fh, j);
  return v;
}

std::vector<double> modes_to_grid(const Eigen::VectorXcd& v, int n) {
  const int N = static_cast<int>(v.size() - 1) / 2;
  std::vector<cplx> fh(static_cast<std::size_t>(n), cplx(0.0, 0.0));
  for (int j = -N; j <= N; ++j) {
    if (2 * std::abs(j) > n) continue;
    fh[static_cast<std::size_t>((j + n) % n)] += v(j + N);
  }
  return idft_real(fh);
}

KernelBasis kernel_basis(const WaveProfile& w, const Chart& ch, const ProfilePartials& pp, const OperatorSet& ops) {
  const int N = ops.N;
  const int dim = 2 * N + 1;
  const double k = w.k;

  // Non-degeneracy: T_a != 0 and (M_c, P_c) != 0, read off the chart.
  const double T_a = -ch.J[0][0] / (k * k);
  const double Jscale = std::sqrt(ch.J[0][0] * ch.J[0][0] + ch.J[0][1] * ch.J[0][1] + ch.J[0][2] * ch.J[0][2]);
  if (!(std::abs(T_a) * k * k > 1e-12 * Jscale)) throw Error(ErrorKind::DegenerateChart, "T_a vanishes at this wave");
  if (ch.J[1][2] == 0.0 && ch.J[2][2] == 0.0) throw Error(ErrorKind::DegenerateChart, "M_c and P_c both vanish");

  KernelBasis b;
  b.Phi1 = grid_to_modes(w.dphi, N);
  b.Phi2 = grid_to_modes(pp.phi_M, N);
  b.Phi3 = grid_to_modes(pp.phi_P, N);
  b.phi_k = grid_to_modes(pp.phi_k, N);
  b.Psi2 = VectorXcd::Zero(dim);
  b.Psi2(N) = 1.0;
  b.Psi3 = grid_to_modes(w.phi, N) - k * k * grid_to_modes(w.d2phi, N);

  Eigen::BDCSVD<MatrixXcd> svd(ops.A0);
  const Eigen::VectorXd sv = svd.singularValues();
  b.singular_values = sv.reverse();
  const double smax = sv(0);
  b.nullity = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < kNullityTol * smax) ++b.nullity;
  if (b.nullity != 2) {
    throw Error(ErrorKind::KernelDimensionMismatch,
                "A0 has " + std::to_string(b.nullity) + " singular values below tolerance, expected 2");
  }

  // beta: A0^H beta = alpha 1 + gamma Psi3 with the pair chosen so that
  // L0^-1 of the right-hand side has zero mean; since A0^H = -L0 J0 this gives
  // J0 beta = -(alpha w1 + gamma w3).
  MatrixXcd B = MatrixXcd::Zero(dim + 1, dim + 1);
  B.topLeftCorner(dim, dim) = ops.L0;
  B.block(0, dim, dim, 1) = b.Phi1;
  B.block(dim, 0, 1, dim) = b.Phi1.adjoint();
  MatrixXcd rhs = MatrixXcd::Zero(dim + 1, 2);
  rhs.block(0, 0, dim, 1) = b.Psi2;
  rhs.block(0, 1, dim, 1) = b.Psi3;
  const MatrixXcd sol = B.partialPivLu().solve(rhs);
  const VectorXcd w1 = sol.block(0, 0, dim, 1);
  const VectorXcd w3 = sol.block(0, 1, dim, 1);
  const cplx alpha = w3(N);
  const cplx gamma = -w1(N);
  const VectorXcd wv = alpha * w1 + gamma * w3;
  const VectorXcd j0 = ops.J0.diagonal();
  b.Psi1 = VectorXcd::Zero(dim);
  for (int i = 0; i < dim; ++i)
    if (i != N) b.Psi1(i) = -wv(i) / j0(i);
  const cplx s = b.Psi1.dot(b.Phi1);
  b.Psi1 /= std::conj(s);

  const std::array<const VectorXcd*, 3> psi = {&b.Psi1, &b.Psi2, &b.Psi3};
  const std::array<const VectorXcd*, 3> phi = {&b.Phi1, &b.Phi2, &b.Phi3};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b.gram(i, j) = psi[static_cast<std::size_t>(i)]->dot(*phi[static_cast<std::size_t>(j)]);
  return b;
}

Eigen::Matrix3cd d0_matrix(const KernelBasis& b, const OperatorSet& ops, const Chart& ch, const WaveProfile& w) {
  const double k = w.k;
  const double ck = ch.c_partials[0];
  const double cM = ch.c_partials[1];
  const double cP = ch.c_partials[2];
  const VectorXcd v1 = ops.A1 * b.phi_k + ops.A2 * b.Phi1;
  const VectorXcd v2 = ops.A1 * b.Phi2;
  const VectorXcd v3 = ops.A1 * b.Phi3;
  const cplx dd = b.Phi1.dot(b.Phi1);
  Eigen::Matrix3cd D;
  D(0, 0) = -k * ck;
  D(0, 1) = -k * cM;
  D(0, 2) = -k * cP;
  D(1, 0) = b.Psi2.dot(v1);
  D(1, 1) = b.Psi2.dot(v2);
  D(1, 2) = b.Psi2.dot(v3);
  D(2, 0) = b.Psi3.dot(v1 + k * ck * b.phi_k);
  D(2, 1) = b.Psi3.dot(v2) - k * k * cM * dd;
  D(2, 2) = b.Psi3.dot(v3) - k * k * cP * dd;
  return D;
}

std::array<cplx, 3> eigenvalues3(const Eigen::Matrix3cd& m) {
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(m, false);
  const auto& e = es.eigenvalues();
  return sorted3({e(0), e(1), e(2)});
}

std::vector<double> default_xi_list() {
  std::vector<double> xs;
  for (int j = 0; j <= 6; ++j) xs.push_back(0.1 * std::ldexp(1.0, -j));
  return xs;
}

Eigen::VectorXcd bloch_spectrum(const WaveProfile& w, int N, double xi) {
  const FourierOperator A = assemble(w, OperatorLabel::Axi, N, xi);
  Eigen::ComplexEigenSolver<MatrixXcd> es(A.mat, false);
  return es.eigenvalues();
}

namespace {

std::array<cplx, 3> smallest3(const VectorXcd& ev) {
  std::vector<cplx> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb) return ma < mb;
    return std::arg(a) < std::arg(b);
  });
  return {v[0], v[1], v[2]};
}

// Assigns to each reference slot the nearest candidate. Returns false when two
// slots claim the same candidate.
bool match(const std::array<cplx, 3>& ref, const std::array<cplx, 3>& cand, std::array<cplx, 3>& out) {
  std::array<int, 3> pick{};
  for (int i = 0; i < 3; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 3; ++j) {
      const double d = std::abs(ref[static_cast<std::size_t>(i)] - cand[static_cast<std::size_t>(j)]);
      if (d < best) {
        best = d;
        pick[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  if (pick[0] == pick[1] || pick[0] == pick[2] || pick[1] == pick[2]) return false;
  for (std::size_t i = 0; i < 3; ++i) out[i] = cand[static_cast<std::size_t>(pick[i])];
  return true;
}

}  // namespace

SpectralCurves bloch_curves(const WaveProfile& w, const Eigen::Matrix3cd& d0, int N, const std::vector<double>& xis) {
  SpectralCurves sc;
  sc.xis = xis;
  sc.d0_eigs = eigenvalues3(d0);
  const std::size_t count = xis.size();
  sc.lambdas.resize(count);
  sc.mus.resize(count);
  sc.errors.resize(count);
  for (double x : xis)
    if (!(x > 0.0 && x < pi)) throw Error(ErrorKind::InvalidInput, "Bloch parameters must lie in (0, pi)");

  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xis[a] < xis[b]; });

  const cplx ik(0.0, w.k);
  auto mus_at = [&](double xi) {
    std::array<cplx, 3> lam = smallest3(bloch_spectrum(w, N, xi));
    for (auto& l : lam) l /= ik * xi;
    return lam;
  };

  std::array<cplx, 3> ref = sc.d0_eigs;
  double ref_xi = 0.0;
  for (std::size_t idx : order) {
    const double target = xis[idx];
    // Walk from ref_xi to target, halving the step whenever the match is ambiguous.
    double step = target - ref_xi;
    double at = ref_xi;
    int halvings = 0;
    while (at < target) {
      const double next = std::min(target, at + step);
      std::array<cplx, 3> m{};
      const std::array<cplx, 3> cand = mus_at(next);
      if (match(ref, cand, m)) {
        ref = m;
        at = next;
      } else {
        if (++halvings > 12) {
          throw Error(ErrorKind::MatchingAmbiguity, "eigenvalue continuation is not injective");
        }
        step *= 0.5;
        ++sc.refinements;
      }
    }
    sc.mus[idx] = ref;
    for (std::size_t j = 0; j < 3; ++j) sc.lambdas[idx][j] = ref[j] * ik * target;
    double err = 0.0;
    for (std::size_t j = 0; j < 3; ++j) err = std::max(err, std::abs(ref[j] - sc.d0_eigs[j]));
    sc.errors[idx] = err;
    ref_xi = target;
  }

  if (count >= 2) {
    const std::size_t a = order[0];
    const std::size_t b = order[1];
    const double x1 = xis[a];
    const double x2 = xis[b];
    for (std::size_t j = 0; j < 3; ++j) sc.mu_limit[j] = (x2 * sc.mus[a][j] - x1 * sc.mus[b][j]) / (x2 - x1);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (!(sc.errors[i] > 0.0)) continue;
      const double lx = std::log(xis[i]);
      const double ly = std::log(sc.errors[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++used;
    }
    if (used >= 2) sc.observed_order = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  } else if (count == 1) {
    sc.mu_limit = sc.mus[0];
  }
  return sc;
}

Verdict modulational_verdict(const std::array<cplx, 3>& e, double tol_im, double tol_gap) {
  double scale = 0.0;
  for (const auto& z : e) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return Verdict::Degenerate;
  for (const auto& z : e)
    if (std::abs(z.imag()) > tol_im * scale) return Verdict::Unstable;
  std::array<double, 3> re = {e[0].real(), e[1].real(), e[2].real()};
  std::sort(re.begin(), re.end());
  const double gap = std::min(re[1] - re[0], re[2] - re[1]);
  return gap > tol_gap * scale ? Verdict::Stable : Verdict::Degenerate;
}

Verdict modulational_verdict(const SpectralCurves& curves, double tol_im, double tol_gap) {
  return modulational_verdict(curves.d0_eigs, tol_im, tol_gap);
}

double hausdorff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  auto directed = [](const VectorXcd& x, const VectorXcd& y) {
    double h = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < y.size(); ++j) best = std::min(best, std::abs(x(i) - y(j)));
      h = std::max(h, best);
    }
    return h;
  };
  return std::max(directed(a, b), directed(b, a));
}

SymmetryReport spectral_symmetry(const WaveProfile& w, int N, double xi) {
  const FourierOperator A = assemble(w, OperatorLabel::Axi, N, xi);
  Eigen::ComplexEigenSolver<MatrixXcd> es(A.mat, false);
  const VectorXcd ev = es.eigenvalues();
  const VectorXcd em = bloch_spectrum(w, N, -xi);
  SymmetryReport r;
  Eigen::BDCSVD<MatrixXcd> svd(A.mat);
  r.norm = svd.singularValues()(0);
  r.reflection = hausdorff(ev, -ev.conjugate());
  r.pairing = hausdorff(em, ev.conjugate());
  return r;
}

}  // namespace chm
