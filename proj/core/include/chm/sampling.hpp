#pragma once

// Interior sample points of the existence region.

#include <utility>
#include <vector>

#include "chm/existence.hpp"

namespace chm {

/// a = alpha * 4c^3/27 and E = V2 + tau (V1 - V2), with alpha, tau in (0, 1).
WaveParams interior_params(double c, double alpha, double tau);

/// Open interval of a with V2(a) < E < V1(a) at speed c. Empty (first >= second)
/// when E lies outside (-c^2/2, c^2/6).
std::pair<double, double> a_range_for_energy(double E, double c);

/// Tensor grid of interior points: for each c, alpha and tau on the midpoints
/// of [lo, hi] split into na and nt cells.
std::vector<WaveParams> interior_grid(const std::vector<double>& cs, int na, int nt, double lo = 0.1,
                                      double hi = 0.9);

}  // namespace chm
