#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "chm/bloch.hpp"
#include "chm/error.hpp"
#include "chm/existence.hpp"
#include "chm/quadrature.hpp"
#include "chm/reparam.hpp"
#include "chm/sampling.hpp"
#include "chm/stokes.hpp"
#include "chm/whitham.hpp"

namespace chm::cli {

// ---------------------------------------------------------------------------
// Deterministic JSON text

namespace {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += sep;
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += close;
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        out += pad;
        dump_into(v, indent, depth + 1, out);
      }
      out += close;
      out += ']';
      return;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

unsigned worker_count() {
  if (const char* env = std::getenv("CHMOD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// ---------------------------------------------------------------------------
// Options

struct Knobs {
  std::string aec;
  std::string kmp;
  std::string guess;
  std::string stokes;
  int grid = kDefaultGrid;
  int modes = kDefaultModes;
  int nodes = kDefaultNodes;
  double fd_step = 1e-5;
  std::vector<double> xis;
  double tol_im = kWhithamTolIm;
  double tol_gap = kWhithamTolGap;
  std::string whitham_method = "exact";
  std::string out;
  std::string format = "json";
  bool timings = false;
  // sweep
  double sweep_c = 2.0;
  int a_count = 10;
  int e_count = 10;
  std::string level = "whitham";
  std::string stokes_k;
  double stokes_M = 1.0;
  double stokes_A = 1e-3;
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }

Vec3 parse_triple(const std::string& s, const char* flag) {
  Vec3 v{};
  std::stringstream ss(s);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) invalid(std::string(flag) + " takes exactly three comma-separated numbers");
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0' || !std::isfinite(x)) {
      invalid(std::string(flag) + ": cannot parse '" + item + "' as a number");
    }
    v[i++] = x;
  }
  if (i != 3) invalid(std::string(flag) + " takes exactly three comma-separated numbers");
  return v;
}

void validate(const Knobs& k) {
  if (k.grid < 64 || (k.grid & (k.grid - 1)) != 0) invalid("--grid must be a power of two >= 64");
  if (k.modes < 1 || 4 * k.modes > k.grid) invalid("--modes must satisfy 1 <= N <= grid/4");
  if (k.nodes < 8) invalid("--nodes must be at least 8");
  if (!(k.fd_step > 0.0 && k.fd_step < 0.1)) invalid("--fd-step must lie in (0, 0.1)");
  if (!(k.tol_im > 0.0) || !(k.tol_gap > 0.0)) invalid("tolerances must be positive");
  for (double x : k.xis)
    if (!(x > 0.0 && x < std::numbers::pi)) invalid("--xi-list entries must lie in (0, pi)");
  if (k.format != "json" && k.format != "csv") invalid("--format must be json or csv");
  if (k.whitham_method != "exact" && k.whitham_method != "fd") invalid("--whitham-method must be exact or fd");
}

WhithamOptions whitham_options(const Knobs& k) {
  WhithamOptions o;
  o.method = k.whitham_method == "fd" ? WhithamMethod::FiniteDifference : WhithamMethod::Exact;
  o.fd_step = k.fd_step;
  o.nodes = k.nodes;
  o.grid = k.grid;
  o.tol_im = k.tol_im;
  o.tol_gap = k.tol_gap;
  return o;
}

// ---------------------------------------------------------------------------
// JSON helpers

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Json mat_json(const Mat3& m) { return Json::array({vec_json(m[0]), vec_json(m[1]), vec_json(m[2])}); }

Json cplx_json(const std::complex<double>& z) { return Json::array({z.real(), z.imag()}); }

template <class C>
Json cplx_list(const C& zs) {
  Json a = Json::array();
  for (const auto& z : zs) a.push_back(cplx_json(z));
  return a;
}

Json params_json(const WaveParams& p) { return Json{{"a", p.a}, {"E", p.E}, {"c", p.c}}; }

// ---------------------------------------------------------------------------
// Wave resolution

struct ResolvedWave {
  WaveParams params;
  Orbit orbit;
  Json input;
};

ResolvedWave resolve(const Knobs& k) {
  const bool has_aec = !k.aec.empty();
  const bool has_kmp = !k.kmp.empty();
  if (has_aec == has_kmp) invalid("supply exactly one of --aec or --kmp");
  ResolvedWave r;
  if (has_aec) {
    const Vec3 v = parse_triple(k.aec, "--aec");
    r.params = {v[0], v[1], v[2]};
    r.input = Json{{"chart", "aec"}, {"a", v[0]}, {"E", v[1]}, {"c", v[2]}};
    if (!(r.params.c > 0.0)) invalid("wave speed c must be positive");
    (void)critical_points(r.params.a, r.params.c);  // NoCriticalPoints outside (0, 4c^3/27]
    const Region reg = region_membership(r.params);
    if (reg != Region::Interior) {
      throw Error(ErrorKind::NotInRegion, "(a, E, c) is " + std::string(to_string(reg)) + ", not Interior");
    }
    r.orbit = orbit_of(r.params);
  } else {
    if (k.guess.empty()) invalid("--kmp needs --guess a,E,c for the Newton iteration");
    const Vec3 t = parse_triple(k.kmp, "--kmp");
    const Vec3 g = parse_triple(k.guess, "--guess");
    const WaveParams guess{g[0], g[1], g[2]};
    if (region_membership(guess) != Region::Interior) throw Error(ErrorKind::NotInRegion, "--guess is not Interior");
    r.orbit = orbit_from_kmp(t, orbit_of(guess), nullptr, k.nodes);
    r.params = r.orbit.params();
    r.input = Json{{"chart", "kmp"}, {"k", t[0]}, {"M", t[1]}, {"P", t[2]}, {"guess", params_json(guess)}};
  }
  return r;
}

// ---------------------------------------------------------------------------
// Record builders

Json wave_section(const ResolvedWave& rw, const Knobs& k, WaveProfile& w, Json& flags) {
  const WaveParams& p = rw.params;
  const PotentialShape s = critical_points(p.a, p.c);
  const WaveFunctionals f = orbit_functionals(rw.orbit, k.nodes);
  w = orbit_profile(rw.orbit, k.grid);
  w.params = p;
  if (w.near_singular) flags.push_back("near_singular");
  if (rw.orbit.phi_min() - s.phi1 < 1e-6 * p.c) flags.push_back("near_solitary");
  if (w.under_resolved) flags.push_back("under_resolved");
  Json j;
  j["params"] = params_json(p);
  j["region"] = std::string(to_string(region_membership(p)));
  j["potential"] = Json{{"phi1", s.phi1}, {"phi2", s.phi2}, {"V1", s.V1}, {"V2", s.V2}};
  j["turning_points"] = Json{{"phi_min", rw.orbit.phi_min()}, {"phi_max", rw.orbit.phi_max()}};
  j["functionals"] = Json{{"T", f.T},           {"k", f.k},           {"M", f.M},
                          {"P", f.P},           {"F", f.F},           {"action", f.action},
                          {"M_mean", f.M_mean}, {"P_mean", f.P_mean}};
  j["kmp"] = Json{{"k", f.k}, {"M", f.M_mean}, {"P", f.P_mean}};
  j["profile"] = Json{{"grid", w.size()},
                      {"profile_residual", w.profile_residual},
                      {"quadrature_residual", w.quadrature_residual},
                      {"tail_ratio", w.tail_ratio(k.modes)}};
  return j;
}

Json chart_json(const Chart& ch) {
  return Json{{"J", mat_json(ch.J)},
              {"Jinv", mat_json(ch.Jinv)},
              {"det_J", ch.det_J},
              {"c_partials", vec_json(ch.c_partials)},
              {"E_partials", vec_json(ch.E_partials)},
              {"a_partials", vec_json(ch.a_partials)}};
}

double max_im_ratio(const std::array<std::complex<double>, 3>& e) {
  double rho = 0.0;
  double im = 0.0;
  for (const auto& z : e) {
    rho = std::max(rho, std::abs(z));
    im = std::max(im, std::abs(z.imag()));
  }
  return rho > 0.0 ? im / rho : 0.0;
}

Json whitham_json(const WhithamMatrix& wm, const Knobs& k) {
  return Json{{"method", k.whitham_method},
              {"W", mat_json(wm.W)},
              {"eigenvalues", cplx_list(wm.eigenvalues)},
              {"max_im_over_radius", max_im_ratio(wm.eigenvalues)},
              {"classification", std::string(to_string(wm.classification))}};
}

struct SpectralData {
  Chart chart;
  ProfilePartials partials;
  OperatorSet ops;
  KernelBasis basis;
  Eigen::Matrix3cd d0;
};

SpectralData spectral_data(const WaveProfile& w, const Chart& ch, const Knobs& k) {
  SpectralData s;
  s.chart = ch;
  s.partials = profile_partials(w, ch, PartialsMethod::LinearSolve, k.modes);
  s.ops = assemble_all(w, k.modes);
  s.basis = kernel_basis(w, ch, s.partials, s.ops);
  s.d0 = d0_matrix(s.basis, s.ops, ch, w);
  return s;
}

Json cmatrix_real_json(const Eigen::Matrix3cd& m) {
  Json a = Json::array();
  for (int i = 0; i < 3; ++i) a.push_back(Json::array({m(i, 0).real(), m(i, 1).real(), m(i, 2).real()}));
  return a;
}

double max_imag(const Eigen::Matrix3cd& m) { return m.imag().cwiseAbs().maxCoeff(); }

struct Identity {
  double residual = 0.0;
  Mat3 d0_minus_c{};
};

Identity identity_residual(const WhithamMatrix& wm, const Eigen::Matrix3cd& d0, double c) {
  Identity id;
  double diff = 0.0;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double d = d0(i, j).real() - (i == j ? c : 0.0);
      id.d0_minus_c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
      diff = std::max(diff, std::abs(wm.W[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - d));
      scale = std::max(scale, std::abs(wm.W[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    }
  }
  id.residual = diff / scale;
  return id;
}

Json kernel_json(const KernelBasis& b, const Chart& ch, const OperatorSet& ops, double k) {
  const Eigen::Matrix3cd dev = b.gram - Eigen::Matrix3cd::Identity();
  const double cM = ch.c_partials[1];
  const double cP = ch.c_partials[2];
  const double r2 = (ops.A0 * b.Phi2 + k * cM * b.Phi1).norm() / std::max(b.Phi2.norm(), 1e-300);
  const double r3 = (ops.A0 * b.Phi3 + k * cP * b.Phi1).norm() / std::max(b.Phi3.norm(), 1e-300);
  Json sv = Json::array();
  for (int i = 0; i < std::min<int>(4, static_cast<int>(b.singular_values.size())); ++i)
    sv.push_back(b.singular_values(i));
  return Json{{"nullity", b.nullity},
              {"smallest_singular_values", sv},
              {"norm_A0", b.singular_values(b.singular_values.size() - 1)},
              {"gram_deviation", dev.cwiseAbs().maxCoeff()},
              {"A0_Phi2_residual", r2},
              {"A0_Phi3_residual", r3}};
}

// ---------------------------------------------------------------------------
// Commands

struct Output {
  Json json;
  std::string csv;
};

using Clock = std::chrono::steady_clock;

Output cmd_wave(const Knobs& k) {
  const ResolvedWave rw = resolve(k);
  Json flags = Json::array();
  WaveProfile w;
  Json rec{{"schema", 1}, {"command", "wave"}, {"input", rw.input}};
  rec.update(wave_section(rw, k, w, flags));
  rec["flags"] = flags;
  std::ostringstream csv;
  csv << "theta,phi,dphi\n";
  for (int j = 0; j < w.size(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    csv << format_double(w.theta[i]) << ',' << format_double(w.phi[i]) << ',' << format_double(w.dphi[i]) << '\n';
  }
  return {rec, csv.str()};
}

Output cmd_whitham(const Knobs& k) {
  const ResolvedWave rw = resolve(k);
  Json flags = Json::array();
  WaveProfile w;
  Json rec{{"schema", 1}, {"command", "whitham"}, {"input", rw.input}};
  rec.update(wave_section(rw, k, w, flags));
  const Chart ch = orbit_chart(rw.orbit, k.nodes);
  const WhithamMatrix wm = whitham_matrix(rw.orbit, whitham_options(k));
  rec["chart"] = chart_json(ch);
  rec["whitham"] = whitham_json(wm, k);
  rec["flags"] = flags;
  std::ostringstream csv;
  csv << "row,col0,col1,col2\n";
  for (std::size_t i = 0; i < 3; ++i)
    csv << i << ',' << format_double(wm.W[i][0]) << ',' << format_double(wm.W[i][1]) << ','
        << format_double(wm.W[i][2]) << '\n';
  return {rec, csv.str()};
}

Output cmd_spectrum(const Knobs& k) {
  const ResolvedWave rw = resolve(k);
  Json flags = Json::array();
  WaveProfile w;
  Json rec{{"schema", 1}, {"command", "spectrum"}, {"input", rw.input}};
  rec.update(wave_section(rw, k, w, flags));
  const Chart ch = orbit_chart(rw.orbit, k.nodes);
  const SpectralData s = spectral_data(w, ch, k);
  const std::vector<double> xis = k.xis.empty() ? default_xi_list() : k.xis;
  const SpectralCurves sc = bloch_curves(w, s.d0, k.modes, xis);
  Json table = Json::array();
  std::ostringstream csv;
  csv << "xi,mu1_re,mu1_im,mu2_re,mu2_im,mu3_re,mu3_im,error\n";
  for (std::size_t i = 0; i < sc.xis.size(); ++i) {
    table.push_back(Json{{"xi", sc.xis[i]}, {"mu", cplx_list(sc.mus[i])}, {"error", sc.errors[i]}});
    csv << format_double(sc.xis[i]);
    for (const auto& m : sc.mus[i]) csv << ',' << format_double(m.real()) << ',' << format_double(m.imag());
    csv << ',' << format_double(sc.errors[i]) << '\n';
  }
  rec["d0"] = Json{{"matrix", cmatrix_real_json(s.d0)}, {"max_imag", max_imag(s.d0)},
                   {"eigenvalues", cplx_list(sc.d0_eigs)}};
  rec["kernel"] = kernel_json(s.basis, ch, s.ops, w.k);
  rec["bloch"] = Json{{"modes", k.modes},
                      {"table", table},
                      {"observed_order", sc.observed_order},
                      {"mu_limit", cplx_list(sc.mu_limit)},
                      {"refinements", sc.refinements}};
  rec["verdict"] = std::string(to_string(modulational_verdict(sc, k.tol_im, k.tol_gap)));
  rec["flags"] = flags;
  return {rec, csv.str()};
}

Output cmd_verify_identity(const Knobs& k) {
  const ResolvedWave rw = resolve(k);
  Json flags = Json::array();
  WaveProfile w;
  Json rec{{"schema", 1}, {"command", "verify-identity"}, {"input", rw.input}};
  rec.update(wave_section(rw, k, w, flags));
  const Chart ch = orbit_chart(rw.orbit, k.nodes);
  const WhithamMatrix wm = whitham_matrix(rw.orbit, whitham_options(k));
  const SpectralData s = spectral_data(w, ch, k);
  const Identity id = identity_residual(wm, s.d0, rw.params.c);
  rec["whitham"] = whitham_json(wm, k);
  rec["d0"] = Json{{"matrix", cmatrix_real_json(s.d0)}, {"max_imag", max_imag(s.d0)},
                   {"eigenvalues", cplx_list(eigenvalues3(s.d0))}};
  rec["d0_minus_cI"] = mat_json(id.d0_minus_c);
  rec["identity_residual"] = id.residual;
  rec["kernel"] = kernel_json(s.basis, ch, s.ops, w.k);
  rec["verdict"] = std::string(to_string(modulational_verdict(eigenvalues3(s.d0), k.tol_im, k.tol_gap)));
  rec["flags"] = flags;
  std::ostringstream csv;
  csv << "row,col,W,D0_minus_cI,difference\n";
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      csv << i << ',' << j << ',' << format_double(wm.W[i][j]) << ',' << format_double(id.d0_minus_c[i][j]) << ','
          << format_double(wm.W[i][j] - id.d0_minus_c[i][j]) << '\n';
  return {rec, csv.str()};
}

Output cmd_stokes_check(const Knobs& k) {
  if (k.stokes.empty()) invalid("stokes-check needs --stokes k,M,A");
  const Vec3 v = parse_triple(k.stokes, "--stokes");
  const StokesParams sp{v[0], v[1], v[2]};
  if (!(sp.k > 0.0 && sp.M > 0.0 && sp.A > 0.0)) invalid("--stokes needs k, M, A > 0");
  if (sp.A > kStokesAmplitudeGuard * sp.M) throw Error(ErrorKind::AmplitudeTooLarge, "A exceeds 0.01 M");
  const StokesWave sw = stokes_wave(sp, k.grid, k.nodes);
  const WhithamMatrix wm = whitham_matrix(sw.orbit, whitham_options(k));
  std::array<double, 3> oracle = stokes_whitham_eigs(sp);
  std::sort(oracle.begin(), oracle.end());
  const double predicted = omega0(sp.k, sp.M) + sp.A * sp.A * omega2(sp.k, sp.M);
  Json eig = Json::array();
  std::ostringstream csv;
  csv << "quantity,numeric,oracle,difference\n";
  csv << "omega," << format_double(sw.omega) << ',' << format_double(predicted) << ','
      << format_double(sw.omega - predicted) << '\n';
  for (std::size_t i = 0; i < 3; ++i) {
    const double num = wm.eigenvalues[i].real();
    eig.push_back(Json{{"numeric", cplx_json(wm.eigenvalues[i])}, {"oracle", oracle[i]}, {"difference", num - oracle[i]}});
    csv << "lambda" << i + 1 << ',' << format_double(num) << ',' << format_double(oracle[i]) << ','
        << format_double(num - oracle[i]) << '\n';
  }
  Json rec{{"schema", 1}, {"command", "stokes-check"}, {"input", Json{{"k", sp.k}, {"M", sp.M}, {"A", sp.A}}}};
  rec["params"] = params_json(sw.params);
  rec["kmp"] = vec_json(sw.kmp);
  rec["amplitude"] = sw.A;
  rec["omega"] = Json{{"numeric", sw.omega},
                      {"omega0", omega0(sp.k, sp.M)},
                      {"omega2", omega2(sp.k, sp.M)},
                      {"predicted", predicted},
                      {"difference", sw.omega - predicted}};
  rec["whitham"] = whitham_json(wm, k);
  rec["oracle_eigenvalues"] = eig;
  rec["gap_coefficient"] = gap_coefficient(sp.k);
  rec["critical_frequency"] = critical_frequency();
  Json flags = Json::array();
  if (sw.orbit.half_width > 0.0) {
    try {
      WaveProfile w = orbit_profile(sw.orbit, k.grid);
      const Chart ch = orbit_chart(sw.orbit, k.nodes);
      const SpectralData s = spectral_data(w, ch, k);
      rec["identity_residual"] = identity_residual(wm, s.d0, sw.orbit.c).residual;
    } catch (const Error& e) {
      flags.push_back(std::string("identity_unavailable:") + std::string(to_string(e.kind())));
    }
  }
  rec["flags"] = flags;
  return {rec, csv.str()};
}

// ---------------------------------------------------------------------------
// Sweeps

template <class F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) f(i);
  };
  if (workers <= 1) {
    body();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

const char* kRegionColumns =
    "index,c,a,E,region,status,error,k,M,P,lambda1_re,lambda1_im,lambda2_re,lambda2_im,lambda3_re,lambda3_im,"
    "classification,identity_residual";
const char* kStokesColumns =
    "index,k,M,A,status,error,omega,omega_predicted,lambda1,lambda2,lambda3,gap_over_A,oracle_gap_over_A";

struct Row {
  Json json;
  std::string csv;
};

std::string csv_or_empty(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return "";
  if (j[key].is_number_float()) return format_double(j[key].get<double>());
  if (j[key].is_string()) return j[key].get<std::string>();
  return j[key].dump();
}

Row region_point(std::size_t index, const WaveParams& p, const Knobs& k) {
  Json r{{"index", index}, {"c", p.c}, {"a", p.a}, {"E", p.E}};
  const Region reg = region_membership(p);
  r["region"] = std::string(to_string(reg));
  std::array<std::complex<double>, 3> ev{};
  bool have_ev = false;
  try {
    if (reg == Region::Interior && k.level != "region") {
      const Orbit o = orbit_of(p);
      const WhithamMatrix wm = whitham_matrix(o, whitham_options(k));
      const WaveFunctionals f = orbit_functionals(o, k.nodes);
      r["k"] = f.k;
      r["M"] = f.M_mean;
      r["P"] = f.P_mean;
      ev = wm.eigenvalues;
      have_ev = true;
      r["eigenvalues"] = cplx_list(ev);
      r["classification"] = std::string(to_string(wm.classification));
      if (k.level == "identity") {
        WaveProfile w = orbit_profile(o, k.grid);
        w.params = p;
        const Chart ch = orbit_chart(o, k.nodes);
        const SpectralData s = spectral_data(w, ch, k);
        r["identity_residual"] = identity_residual(wm, s.d0, p.c).residual;
      }
    }
    r["status"] = "ok";
  } catch (const Error& e) {
    r["status"] = "failed";
    r["error"] = std::string(to_string(e.kind()));
  }
  std::ostringstream csv;
  csv << index << ',' << format_double(p.c) << ',' << format_double(p.a) << ',' << format_double(p.E) << ','
      << csv_or_empty(r, "region") << ',' << csv_or_empty(r, "status") << ',' << csv_or_empty(r, "error") << ','
      << csv_or_empty(r, "k") << ',' << csv_or_empty(r, "M") << ',' << csv_or_empty(r, "P");
  for (const auto& z : ev) {
    if (have_ev) csv << ',' << format_double(z.real()) << ',' << format_double(z.imag());
    else csv << ",,";
  }
  csv << ',' << csv_or_empty(r, "classification") << ',' << csv_or_empty(r, "identity_residual") << '\n';
  return {r, csv.str()};
}

Row stokes_point(std::size_t index, double kk, const Knobs& k) {
  const StokesParams sp{kk, k.stokes_M, k.stokes_A};
  Json r{{"index", index}, {"k", kk}, {"M", sp.M}, {"A", sp.A}};
  std::string lam[3];
  try {
    const StokesWave sw = stokes_wave(sp, k.grid, k.nodes);
    const WhithamMatrix wm = whitham_matrix(sw.orbit, whitham_options(k));
    // The eigenvalue nearest -3M is the mass mode; the other two form the pair.
    std::size_t mass = 0;
    for (std::size_t i = 1; i < 3; ++i)
      if (std::abs(wm.eigenvalues[i].real() + 3.0 * sp.M) < std::abs(wm.eigenvalues[mass].real() + 3.0 * sp.M)) mass = i;
    std::vector<std::complex<double>> pair;
    for (std::size_t i = 0; i < 3; ++i)
      if (i != mass) pair.push_back(wm.eigenvalues[i]);
    r["status"] = "ok";
    r["omega"] = sw.omega;
    r["omega_predicted"] = omega0(kk, sp.M) + sp.A * sp.A * omega2(kk, sp.M);
    r["eigenvalues"] = cplx_list(wm.eigenvalues);
    r["gap_over_A"] = std::abs(pair[1] - pair[0]) / sp.A;
    r["oracle_gap_over_A"] = 2.0 * std::abs(gap_coefficient(kk));
    for (std::size_t i = 0; i < 3; ++i) lam[i] = format_double(wm.eigenvalues[i].real());
  } catch (const Error& e) {
    r["status"] = "failed";
    r["error"] = std::string(to_string(e.kind()));
  }
  std::ostringstream csv;
  csv << index << ',' << format_double(kk) << ',' << format_double(sp.M) << ',' << format_double(sp.A) << ','
      << csv_or_empty(r, "status") << ',' << csv_or_empty(r, "error") << ',' << csv_or_empty(r, "omega") << ','
      << csv_or_empty(r, "omega_predicted") << ',' << lam[0] << ',' << lam[1] << ',' << lam[2] << ','
      << csv_or_empty(r, "gap_over_A") << ',' << csv_or_empty(r, "oracle_gap_over_A") << '\n';
  return {r, csv.str()};
}

// Area of {V2(a) < E < V1(a)} over the box (0, a_max) x (-c^2/2, c^2/6), by the midpoint rule in a.
double region_area_fraction(double c) {
  const int n = 4000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const PotentialShape p = critical_points(a_max(c) * (i + 0.5) / n, c);
    s += p.V1 - p.V2;
  }
  return s / n / (2.0 * c * c / 3.0);
}

Output cmd_sweep(const Knobs& k) {
  Json rec{{"schema", 1}, {"command", "sweep"}};
  std::vector<Row> rows;
  std::string header;
  if (!k.stokes_k.empty()) {
    const Vec3 v = parse_triple(k.stokes_k, "--stokes-k");
    const int count = static_cast<int>(v[2]);
    if (count < 0 || static_cast<double>(count) != v[2]) invalid("--stokes-k count must be a non-negative integer");
    if (!(v[0] > 0.0) || v[1] < v[0]) invalid("--stokes-k needs 0 < kmin <= kmax");
    if (!(k.stokes_M > 0.0) || !(k.stokes_A > 0.0)) invalid("--stokes-M and --stokes-A must be positive");
    rec["mode"] = "stokes";
    rec["parameters"] = Json{{"kmin", v[0]}, {"kmax", v[1]}, {"count", count}, {"M", k.stokes_M}, {"A", k.stokes_A}};
    rows.resize(static_cast<std::size_t>(count));
    parallel_for(rows.size(), [&](std::size_t i) {
      const double kk = count == 1 ? v[0] : v[0] + (v[1] - v[0]) * static_cast<double>(i) / (count - 1);
      rows[i] = stokes_point(i, kk, k);
    });
    header = kStokesColumns;
    double best = std::numeric_limits<double>::infinity();
    std::optional<double> kmin;
    for (const Row& r : rows) {
      if (r.json.value("status", "") != "ok") continue;
      const double g = r.json["gap_over_A"].get<double>();
      if (g < best) {
        best = g;
        kmin = r.json["k"].get<double>();
      }
    }
    rec["summary"] = Json{{"k_min_gap", kmin ? Json(*kmin) : Json(nullptr)},
                          {"critical_frequency", critical_frequency()}};
  } else {
    const double c = k.sweep_c;
    if (!(c > 0.0)) invalid("--c must be positive");
    if (k.a_count < 0 || k.e_count < 0) invalid("grid counts must be non-negative");
    if (k.level != "region" && k.level != "whitham" && k.level != "identity") {
      invalid("--level must be region, whitham or identity");
    }
    rec["mode"] = "region";
    rec["parameters"] = Json{{"c", c}, {"a_count", k.a_count}, {"E_count", k.e_count}, {"level", k.level}};
    const std::size_t n = static_cast<std::size_t>(k.a_count) * static_cast<std::size_t>(k.e_count);
    rows.resize(n);
    const double Elo = -0.5 * c * c;
    const double Ehi = c * c / 6.0;
    parallel_for(n, [&](std::size_t idx) {
      const std::size_t i = idx / static_cast<std::size_t>(k.e_count);
      const std::size_t j = idx % static_cast<std::size_t>(k.e_count);
      const WaveParams p{a_max(c) * (static_cast<double>(i) + 0.5) / k.a_count,
                         Elo + (Ehi - Elo) * (static_cast<double>(j) + 0.5) / k.e_count, c};
      rows[idx] = region_point(idx, p, k);
    });
    header = kRegionColumns;
    std::size_t interior = 0;
    std::size_t failed = 0;
    for (const Row& r : rows) {
      if (r.json["region"] == "Interior") ++interior;
      if (r.json["status"] == "failed") ++failed;
    }
    Json summary{{"points", n}, {"interior", interior}, {"failed", failed}};
    summary["interior_fraction"] = n > 0 ? Json(static_cast<double>(interior) / static_cast<double>(n)) : Json(nullptr);
    summary["analytic_interior_fraction"] = region_area_fraction(c);
    rec["summary"] = summary;
  }
  Json records = Json::array();
  std::string csv = header + "\n";
  for (const Row& r : rows) {
    records.push_back(r.json);
    csv += r.csv;
  }
  rec["records"] = records;
  return {rec, csv};
}

void add_wave_inputs(CLI::App* sub, Knobs& k) {
  sub->add_option("--aec", k.aec, "Wave parameters a,E,c");
  sub->add_option("--kmp", k.kmp, "Wave by frequency, mean and momentum k,M,P");
  sub->add_option("--guess", k.guess, "Interior a,E,c starting the --kmp Newton iteration");
}

void add_numerics(CLI::App* sub, Knobs& k) {
  sub->add_option("--grid", k.grid, "Profile grid size, a power of two >= 64")->capture_default_str();
  sub->add_option("--modes", k.modes, "Fourier truncation N (modes -N..N), at most grid/4")->capture_default_str();
  sub->add_option("--nodes", k.nodes, "Quadrature nodes on [0, pi]")->capture_default_str();
  sub->add_option("--fd-step", k.fd_step, "Relative finite-difference step")->capture_default_str();
  sub->add_option("--xi-list", k.xis, "Bloch parameters, comma separated")->delimiter(',');
  sub->add_option("--tol-im", k.tol_im, "Imaginary-part tolerance relative to spectral radius")->capture_default_str();
  sub->add_option("--tol-gap", k.tol_gap, "Eigenvalue gap tolerance relative to spectral radius")->capture_default_str();
  sub->add_option("--whitham-method", k.whitham_method, "exact or fd")->capture_default_str();
  sub->add_option("--out", k.out, "Write output to this path instead of stdout");
  sub->add_option("--format", k.format, "json or csv")->capture_default_str();
  sub->add_flag("--timings", k.timings, "Add wall-clock runtimes to the record (output is then not reproducible)");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot open output file " + path);
  f << text;
}

std::string with_extension(const std::string& path, const std::string& ext) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return path.substr(0, dot) + ext;
  return path + ext;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic travelling waves of the Camassa-Holm equation: profiles, Whitham matrix, Bloch spectrum"};
  app.require_subcommand(1);
  Knobs k;

  auto* wave = app.add_subcommand("wave", "Profile, functionals and region information for one wave");
  auto* whitham = app.add_subcommand("whitham", "Chart and Whitham modulation matrix with its eigenvalues");
  auto* spectrum = app.add_subcommand("spectrum", "Kernel basis, D0 and small-xi Bloch eigenvalue curves");
  auto* verify = app.add_subcommand("verify-identity", "Compare the Whitham matrix with D0 - cI");
  auto* stokes = app.add_subcommand("stokes-check", "Numeric small-amplitude wave against the Stokes expansion");
  auto* sweep = app.add_subcommand("sweep", "Grid over (a, E) at fixed c, or over k for Stokes waves");

  for (auto* sub : {wave, whitham, spectrum, verify}) {
    add_wave_inputs(sub, k);
    add_numerics(sub, k);
  }
  add_numerics(stokes, k);
  stokes->add_option("--stokes", k.stokes, "Stokes parameters k,M,A")->required();
  add_numerics(sweep, k);
  sweep->add_option("--c", k.sweep_c, "Wave speed of a region sweep")->capture_default_str();
  sweep->add_option("--a-count", k.a_count, "Cells in a over (0, 4c^3/27)")->capture_default_str();
  sweep->add_option("--e-count", k.e_count, "Cells in E over (-c^2/2, c^2/6)")->capture_default_str();
  sweep->add_option("--level", k.level, "region, whitham or identity")->capture_default_str();
  sweep->add_option("--stokes-k", k.stokes_k, "Stokes sweep kmin,kmax,count (replaces the region sweep)");
  sweep->add_option("--stokes-M", k.stokes_M, "Mean of the Stokes sweep")->capture_default_str();
  sweep->add_option("--stokes-A", k.stokes_A, "Amplitude of the Stokes sweep")->capture_default_str();
  sweep->footer(std::string("Region CSV columns: ") + kRegionColumns + "\nStokes CSV columns: " + kStokesColumns +
                "\nWith --out PATH both PATH.json and PATH.csv are written. CHMOD_THREADS bounds the worker pool.");
  app.footer("Exit codes: 0 success, 2 invalid input, 3 out of region, 4 numerical degeneracy, 5 internal.");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  const auto t0 = Clock::now();
  Output o;
  try {
    validate(k);
    if (command == "wave") o = cmd_wave(k);
    else if (command == "whitham") o = cmd_whitham(k);
    else if (command == "spectrum") o = cmd_spectrum(k);
    else if (command == "verify-identity") o = cmd_verify_identity(k);
    else if (command == "stokes-check") o = cmd_stokes_check(k);
    else o = cmd_sweep(k);
    if (k.timings) {
      o.json["runtime_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    const std::string json_text = dump(o.json) + "\n";
    if (command == "sweep" && !k.out.empty()) {
      write_text(with_extension(k.out, ".json"), json_text);
      write_text(with_extension(k.out, ".csv"), o.csv);
    } else {
      const std::string& text = k.format == "csv" ? o.csv : json_text;
      if (k.out.empty()) out << text;
      else write_text(k.out, text);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    Json rec{{"schema", 1}, {"command", command},
             {"error", Json{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}}};
    if (k.format == "json" && k.out.empty()) out << dump(rec) << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 5;
  }
}

}  // namespace chm::cli
