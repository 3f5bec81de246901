#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pseudospec/geometry.h"
#include "pseudospec/poly.h"
#include "pseudospec/spectra.h"
#include "pseudospec/sym_matrix.h"

namespace pseudospec {

using Box = std::vector<std::pair<double, double>>;

/// [[x, y], [y, 1 - x]]: the trace-one slice of the 2x2 PSD cone.
MatrixPencil example1_pencil();
/// [[x+1, z, y], [z, 1-y, x], [y, x, z+1]].
MatrixPencil example2_pencil();

/// Parameter points where a pencil is PSD and numerically rank one.
struct RankOneLocus {
  std::vector<Point> points;
  std::vector<Eigen::VectorXd> factors;  // M(points[i]) = factors[i] factors[i]^T
  std::size_t candidates = 0;
  std::size_t newton_failures = 0;
};

struct EnumerateOptions {
  double grid_res = 0.05;
  double tol = 1e-9;
  double dedup_radius = 1e-5;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Grid scan of `box`, flagging grid points whose two smallest pencil
/// eigenvalues lie within the Lipschitz radius of zero, then Newton on the
/// factored system M(x) = w w^T from each flag. Refined points outside the
/// box or failing the PSD/rank-one test at opts.tol are dropped; survivors
/// are sorted and merged within opts.dedup_radius, so the result does not
/// depend on the thread count.
RankOneLocus enumerate_rank_one(const MatrixPencil& pencil, const Box& box,
                                const EnumerateOptions& opts = {});
/// Throws std::invalid_argument if spec carries no pencil.
RankOneLocus enumerate_rank_one(const SpectrahedronSpec& spec, const Box& box,
                                const EnumerateOptions& opts = {});

/// Whether M(x) is PSD within tol (1 + |M|_F) and its second largest
/// eigenvalue is at most tol (1 + |M|_F).
bool is_rank_one_point(const MatrixPencil& pencil, std::span<const double> x, double tol);

/// Boundary points of a pencil spectrahedron along `count` rays from a point
/// where the pencil is positive definite. Two-parameter pencils use equally
/// spaced angles; three-parameter pencils use a Fibonacci sphere. Rays along
/// which the set is unbounded are skipped.
std::vector<Point> boundary_ray_points(const MatrixPencil& pencil,
                                       std::span<const double> interior, int count);

/// Boundary ray points that are also rank one at tol.
RankOneLocus sample_rank_one_boundary(const MatrixPencil& pencil,
                                      std::span<const double> interior, int count, double tol);

/// min x^T A x over a compact set C given by polynomial constraints
/// (quadratic equalities in the intended use).
struct QcqpInstance {
  PolySystem constraints;
  SymMatrix objective;
  Box box;
};

struct QcqpReport {
  std::size_t samples = 0;
  std::size_t feasible = 0;
  double brute_min = 0.0;
  double hull_min = 0.0;
  double gap = 0.0;
  Point argmin;
};

/// {x^2 + y^2 = 1} in [-1.5, 1.5]^2 with A = diag(1, -1); the minimum is -1.
QcqpInstance circle_instance();
/// The four rank-one parameter points of the 3x3 example pencil as the
/// x-projection of {(x, w) : M(x) = w w^T} in [-2, 2]^6, with A = I on x and
/// 0 on w.
QcqpInstance four_point_instance();

/// Draws points of C (Gauss-Newton projection of uniform box samples onto
/// the equations, then acceptance on every constraint and the box).
/// Returns an empty list when no sample is feasible.
std::vector<Point> sample_constraint_set(const PolySystem& sys, const Box& box, int n_samples,
                                         std::mt19937_64& rng);

/// brute_min = min x^T A x over samples of C; hull_min = min <A, X> over the
/// convex hull of the lifted samples x x^T; gap = brute_min - hull_min.
QcqpReport qcqp_check(const QcqpInstance& inst, int n_samples, std::mt19937_64& rng);

struct TraceSliceTerm {
  double weight = 0.0;
  SymMatrix projector;  // u u^T with |u| = 1, so trace 1
};

/// X = sum_i lambda_i u_i u_i^T from the eigendecomposition; weights below
/// zero by rounding are clipped.
std::vector<TraceSliceTerm> decompose_trace_one(const SymMatrix& x);

struct TraceSliceReport {
  int n = 0;
  std::size_t samples = 0;
  double max_reconstruction_error = 0.0;
  double min_weight = 0.0;
  double max_weight_sum_error = 0.0;
  double max_term_trace_error = 0.0;
  double max_term_rank_two = 0.0;  // largest second eigenvalue among terms
};

/// Random trace-one PSD matrices of random rank, each decomposed into a
/// convex combination of rank-one trace-one matrices.
TraceSliceReport trace_slice_pseudo_check(int n, int n_samples, std::mt19937_64& rng);

struct RankCombination {
  std::vector<Point> points;  // pencil parameters of rank-one elements
  std::vector<double> weights;
};

struct BoundaryRankEntry {
  Point parameter;  // sum w_i p_i
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool psd = false;
  bool singular = false;
};

struct BoundaryRankReport {
  std::vector<BoundaryRankEntry> entries;
  std::size_t violations = 0;
  bool ok() const { return violations == 0; }
};

/// For each convex combination of at most N - 1 rank-one pencil values,
/// checks that the combined matrix is PSD and singular (min eigenvalue <=
/// 1e-9 |M|_F). Throws std::invalid_argument on a combination with N or more
/// points or mismatched weights.
BoundaryRankReport boundary_rank_check(const MatrixPencil& pencil,
                                       std::span<const RankCombination> combos);

}  // namespace pseudospec
