#pragma once

// Brute-force minimization of a scalar function over the unit sphere, used
// as the independent oracle for every closed-form minimum in the library.

#include "ipower/qmat.hpp"

#include <functional>

namespace ipower::sphere {

// theta_i = i pi / (theta_points - 1), i = 0..theta_points-1 (both poles);
// phi_j = 2 pi j / phi_points, j = 0..phi_points-1.
struct Grid {
  int theta_points = 256;
  int phi_points = 512;
  // Polish the best grid point with a derivative-free pattern search in the
  // tangent plane. Off by default: the raw grid minimum is the oracle.
  bool refine = false;

  double spacing() const;
};

struct Minimum {
  double value = 0.0;
  qmat::BlochVector argmin = qmat::BlochVector::UnitZ();
  double theta = 0.0;
  double phi = 0.0;
  // Largest value seen on the grid.
  double grid_max = 0.0;
  // 2 * grid_max * spacing, an upper bound on value - true minimum for a
  // quadratic form n^T M n whose largest eigenvalue is close to grid_max.
  double error_bound = 0.0;
};

using Objective = std::function<double(const qmat::BlochVector&)>;

// Deterministic: ties are broken by the lowest grid index (theta-major).
Minimum minimize(const Objective& f, const Grid& grid);

// Same scan but returns the maximizer in Minimum's fields (value = max).
Minimum maximize(const Objective& f, const Grid& grid);

}  // namespace ipower::sphere
