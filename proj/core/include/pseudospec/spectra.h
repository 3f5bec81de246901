#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pseudospec/sym_matrix.h"

namespace pseudospec {

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, matching values
};

EigenDecomposition eigh(const SymMatrix& m);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to 0).
SymMatrix project_psd(const SymMatrix& m);

/// Flips v so its first entry with |v_i| > 1e-12 |v| is positive.
void canonicalize_sign(Eigen::VectorXd& v);

/// v with X = v v^T when X is numerically rank one: lambda_2 <= tol *
/// lambda_max and lambda_min >= -tol * lambda_max. The zero matrix counts as
/// rank 0 and is rejected.
std::optional<Eigen::VectorXd> rank_one_factor(const SymMatrix& x, double tol);

/// M(x) = base + sum_i x_i params[i].
struct MatrixPencil {
  SymMatrix base;
  std::vector<SymMatrix> params;

  int size() const { return base.size(); }
  int dimension() const { return static_cast<int>(params.size()); }
  SymMatrix at(std::span<const double> x) const;
  void validate() const;
};

struct AffineConstraint {
  SymMatrix a;
  double rhs = 0.0;
};

/// PSD cone of size n intersected with {X : <A_i, X> = a_i}. When built from
/// a pencil the pencil is kept alongside its slice form.
struct SpectrahedronSpec {
  int n = 0;
  std::vector<AffineConstraint> constraints;
  std::optional<MatrixPencil> pencil;
  /// trace(X) is fixed to this value by the constraints, when known.
  std::optional<double> trace_bound;

  void validate() const;
  double max_residual(const SymMatrix& x) const;
};

/// Slice form of a pencil: constraints spanning the orthogonal complement of
/// the parameter directions, with right-hand sides taken at the base point.
SpectrahedronSpec slice_from_pencil(const MatrixPencil& pencil);

/// Pencil form of a slice: minimum-norm point of the affine set plus an
/// orthonormal basis of its direction space. Throws std::invalid_argument if
/// the constraints are inconsistent.
MatrixPencil pencil_from_slice(int n, std::span<const AffineConstraint> constraints);

/// Whether X lies in the affine image of the pencil (within tol) and is PSD
/// (min eigenvalue >= -tol).
bool pencil_contains(const MatrixPencil& pencil, const SymMatrix& x, double tol);

struct FeasibilityResult {
  bool feasible = false;
  SymMatrix x;
  double min_eigenvalue = 0.0;
  double max_residual = 0.0;
  /// Distance between the last PSD and affine iterates.
  double gap = 0.0;
  int iterations = 0;
};

/// Alternating projections between the PSD cone and the affine slice.
/// Succeeds once an affine iterate has min eigenvalue >= -tol and residuals
/// <= tol; reports infeasible when successive iterates move by at most
/// tol / 10 without meeting that test, or after max_iters.
FeasibilityResult feasibility(const SpectrahedronSpec& spec, double tol,
                              int max_iters = 50'000);

struct MinimizeResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  double value = 0.0;
  SymMatrix x;
  int bisection_steps = 0;
};

/// min <C, X> over the spectrahedron by bisection on the level t of the
/// feasibility problem with the extra halfspace <C, X> <= t.
MinimizeResult minimize_linear(const SymMatrix& c, const SpectrahedronSpec& spec, double tol,
                               int max_iters = 50'000);

}  // namespace pseudospec
