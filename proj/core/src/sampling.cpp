#include "chm/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "chm/error.hpp"

namespace chm {

WaveParams interior_params(double c, double alpha, double tau) {
  if (!(alpha > 0.0 && alpha < 1.0 && tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "alpha and tau must lie in (0, 1)");
  }
  const double a = alpha * a_max(c);
  const PotentialShape s = critical_points(a, c);
  return {a, s.V2 + tau * (s.V1 - s.V2), c};
}

std::pair<double, double> a_range_for_energy(double E, double c) {
  const double amax = a_max(c);
  if (!(E > -0.5 * c * c && E < c * c / 6.0)) return {0.0, 0.0};
  // V1(a) and V2(a) both increase in a, from (0, -c^2/2) at a = 0 to c^2/6 at a_max.
  auto solve = [&](bool upper) {
    double lo = 0.0;
    double hi = amax;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * amax; ++it) {
      const double mid = 0.5 * (lo + hi);
      const PotentialShape s = critical_points(mid, c);
      const double v = upper ? s.V1 : s.V2;
      if (v < E) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double a_hi = solve(false);
  const double a_lo = E > 0.0 ? solve(true) : 0.0;
  return {a_lo, a_hi};
}

std::vector<WaveParams> interior_grid(const std::vector<double>& cs, int na, int nt, double lo, double hi) {
  std::vector<WaveParams> out;
  for (double c : cs) {
    for (int i = 0; i < na; ++i) {
      const double alpha = lo + (hi - lo) * (i + 0.5) / na;
      for (int j = 0; j < nt; ++j) {
        const double tau = lo + (hi - lo) * (j + 0.5) / nt;
        out.push_back(interior_params(c, alpha, tau));
      }
    }
  }
  return out;
}

}  // namespace chm
