#pragma once

#include <random>
#include <vector>

#include "pseudospec/geometry.h"
#include "pseudospec/poly.h"

namespace pseudospec::testing {

/// A random system with a known feasible point.
struct RandomSystem {
  PolySystem sys;
  Point feasible;
};

/// n <= max_n variables, total degree <= max_degree, 1..max_constraints
/// constraints with every relation kind. Constants are shifted so that
/// `feasible` satisfies every constraint (equations exactly up to rounding,
/// inequalities with margin).
RandomSystem random_system(std::mt19937_64& rng, int max_n = 3, int max_degree = 5,
                           int max_constraints = 4);

/// Quadratic system of strict inequalities f > 0 (with f(center) = 1) plus
/// an optional equation through center; all feasible points near center lie
/// in the box [center - 1, center + 1].
RandomSystem random_strict_quadratic(std::mt19937_64& rng, int max_n = 3);

std::vector<Point> uniform_samples(std::mt19937_64& rng, int n, int count, double lo, double hi);

/// Independent solve of M(x) = w w^T for the 3x3 example pencil: x, y, z are
/// eliminated as (w2 w3, w1 w3, w1 w2), the remaining three equations are
/// scanned on a grid over w and polished with Newton's method, and the
/// solutions are merged up to the sign of w.
std::vector<Point> example2_rank_one_oracle();

/// Parameters (X_11, X_12) of random trace-one 2x2 PSD matrices X = G G^T /
/// tr(G G^T) with G of random rank 1 or 2, so the boundary circle is hit as
/// often as the interior.
std::vector<Point> example1_region_samples(std::mt19937_64& rng, int count);

/// Coordinates near zero and -0 snapped to 0 for exact-looking comparisons.
Point rounded(const Point& p, double step);

}  // namespace pseudospec::testing
