#pragma once

#include <span>
#include <vector>

namespace pseudospec {

using Point = std::vector<double>;

/// Weights of a point in the standard simplex: t_i >= 0, sum t_i = 1 (to 1e-12).
class SimplexWeights {
 public:
  /// Throws std::invalid_argument if t is empty, has a negative entry, or
  /// does not sum to 1 within 1e-12.
  explicit SimplexWeights(std::vector<double> t);

  std::span<const double> values() const { return t_; }
  std::size_t size() const { return t_.size(); }

 private:
  std::vector<double> t_;
};

/// sum t_i y_i.
Point caratheodory_combine(std::span<const Point> points, const SimplexWeights& t);

struct HullMembership {
  bool inside = false;
  /// Convex weights over the input points when inside.
  std::vector<double> weights;
  /// When outside: s with s.x > max_i s.p_i (unit length).
  std::vector<double> separator;
  /// Optimal phase-1 infeasibility (0 for exact members).
  double infeasibility = 0.0;
};

/// Phase-1 simplex (Bland's rule) on sum t_i p_i = x, sum t_i = 1, t >= 0.
/// `inside` holds when the optimal artificial sum is at most tol; otherwise
/// the separator comes from the phase-1 dual.
HullMembership hull_membership(std::span<const double> x, std::span<const Point> points,
                               double tol);

/// Euclidean distance from x to conv(points), computed with Wolfe's
/// minimum-norm-point algorithm after a membership test.
double distance_to_hull(std::span<const double> x, std::span<const Point> points);

/// max(max_{a in A} d(a, conv B), max_{b in B} d(b, conv A)).
double hull_distance(std::span<const Point> a, std::span<const Point> b);

}  // namespace pseudospec
