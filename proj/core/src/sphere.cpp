#include "ipower/sphere.hpp"

#include "ipower/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace ipower::sphere {

using qmat::BlochVector;

namespace {

constexpr double kPi = std::numbers::pi;

struct Scan {
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();
  int min_i = 0, min_j = 0, max_i = 0, max_j = 0;
};

Scan scan(const Objective& f, const Grid& grid) {
  if (grid.theta_points < 2 || grid.phi_points < 1) {
    throw Error(ErrorKind::ParameterOutOfRange, "sphere grid needs >= 2 theta and >= 1 phi points");
  }
  Scan s;
  const double dtheta = kPi / (grid.theta_points - 1);
  const double dphi = 2.0 * kPi / grid.phi_points;
  for (int i = 0; i < grid.theta_points; ++i) {
    const double theta = i * dtheta;
    // The poles are single points; one phi sample is enough there.
    const int nphi = (i == 0 || i == grid.theta_points - 1) ? 1 : grid.phi_points;
    for (int j = 0; j < nphi; ++j) {
      const double v = f(qmat::bloch_from_angles(theta, j * dphi));
      // Strict comparisons keep the lowest index on ties.
      if (v < s.min_value) {
        s.min_value = v;
        s.min_i = i;
        s.min_j = j;
      }
      if (v > s.max_value) {
        s.max_value = v;
        s.max_i = i;
        s.max_j = j;
      }
    }
  }
  return s;
}

// Compass search in the tangent plane of the current point. Each accepted
// step re-projects onto the sphere, so the iterate stays a unit vector.
BlochVector polish(const Objective& f, BlochVector n, double step, double& value) {
  constexpr double kMinStep = 1e-13;
  constexpr int kMaxEvaluations = 200000;
  int evaluations = 0;
  while (step > kMinStep && evaluations < kMaxEvaluations) {
    const BlochVector helper = std::abs(n.x()) < 0.9 ? BlochVector::UnitX() : BlochVector::UnitY();
    const BlochVector u = n.cross(helper).normalized();
    const BlochVector v = n.cross(u);
    const std::array<BlochVector, 8> directions = {
        u, -u, v, -v, (u + v).normalized(), (u - v).normalized(), (-u + v).normalized(),
        (-u - v).normalized()};
    bool moved = false;
    for (const BlochVector& d : directions) {
      const BlochVector candidate = (n + step * d).normalized();
      const double fv = f(candidate);
      ++evaluations;
      if (fv < value) {
        value = fv;
        n = candidate;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return n;
}

Minimum finish(const Objective& f, const Grid& grid, double value, int i, int j, double grid_max) {
  const double dtheta = kPi / (grid.theta_points - 1);
  const double dphi = 2.0 * kPi / grid.phi_points;
  Minimum m;
  m.value = value;
  m.theta = i * dtheta;
  m.phi = j * dphi;
  m.argmin = qmat::bloch_from_angles(m.theta, m.phi);
  m.grid_max = grid_max;
  m.error_bound = 2.0 * std::abs(grid_max) * grid.spacing();
  if (grid.refine) {
    m.argmin = polish(f, m.argmin, grid.spacing(), m.value);
    m.theta = std::acos(std::clamp(m.argmin.z(), -1.0, 1.0));
    m.phi = std::atan2(m.argmin.y(), m.argmin.x());
    if (m.phi < 0.0) m.phi += 2.0 * kPi;
  }
  return m;
}

}  // namespace

double Grid::spacing() const {
  return std::max(kPi / (theta_points - 1), 2.0 * kPi / phi_points);
}

Minimum minimize(const Objective& f, const Grid& grid) {
  const Scan s = scan(f, grid);
  return finish(f, grid, s.min_value, s.min_i, s.min_j, s.max_value);
}

Minimum maximize(const Objective& f, const Grid& grid) {
  const Objective negated = [&f](const BlochVector& n) { return -f(n); };
  const Scan s = scan(negated, grid);
  Minimum m = finish(negated, grid, s.min_value, s.min_i, s.min_j, s.max_value);
  m.value = -m.value;
  m.grid_max = -s.min_value;
  return m;
}

}  // namespace ipower::sphere
