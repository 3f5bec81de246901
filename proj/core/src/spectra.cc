#include "pseudospec/spectra.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pseudospec {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Isometric vectorization of the upper triangle: off-diagonal entries are
// scaled by sqrt(2) so that svec(A) . svec(B) = <A, B>.
Eigen::VectorXd svec(const SymMatrix& m) {
  const int n = m.size();
  Eigen::VectorXd v(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) v(k++) = i == j ? m(i, i) : kSqrt2 * m(i, j);
  }
  return v;
}

SymMatrix smat(const Eigen::VectorXd& v, int n) {
  SymMatrix m(n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m.set(i, j, i == j ? v(k) : v(k) / kSqrt2);
      ++k;
    }
  }
  return m;
}

Eigen::MatrixXd constraint_rows(int n, std::span<const AffineConstraint> constraints,
                                Eigen::VectorXd& rhs) {
  const int d = n * (n + 1) / 2;
  Eigen::MatrixXd a(static_cast<int>(constraints.size()), d);
  rhs.resize(static_cast<int>(constraints.size()));
  for (int r = 0; r < a.rows(); ++r) {
    a.row(r) = svec(constraints[r].a).transpose();
    rhs(r) = constraints[r].rhs;
  }
  return a;
}

// Orthogonal projection onto {x : A x = b} (least-squares set if inconsistent).
class AffineProjector {
 public:
  AffineProjector(int n, std::span<const AffineConstraint> constraints) {
    a_ = constraint_rows(n, constraints, b_);
    if (a_.rows() > 0) pinv_ = a_.completeOrthogonalDecomposition().pseudoInverse();
  }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    if (a_.rows() == 0) return x;
    return x - pinv_ * (a_ * x - b_);
  }

  // Component of a direction lying in the constraint null space.
  Eigen::VectorXd tangent(const Eigen::VectorXd& v) const {
    if (a_.rows() == 0) return v;
    return v - pinv_ * (a_ * v);
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd pinv_;
};

struct HalfSpace {
  Eigen::VectorXd normal;  // svec(C)
  double level = 0.0;      // <C, X> <= level
};

FeasibilityResult alternating_projections(const SpectrahedronSpec& spec,
                                          const std::optional<HalfSpace>& half, double tol,
                                          int max_iters) {
  spec.validate();
  const int n = spec.n;
  const AffineProjector affine(n, spec.constraints);
  // On the affine set <C, X> only varies along the tangential part of C, so
  // affine projection followed by a step along it lands in the intersection.
  const Eigen::VectorXd normal_t = half ? affine.tangent(half->normal) : Eigen::VectorXd();
  const double normal_sq = half ? normal_t.squaredNorm() : 0.0;
  auto project_affine = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd p = affine.project(y);
    if (half && normal_sq > 1e-24) {
      const double over = half->normal.dot(p) - half->level;
      if (over > 0.0) p -= (over / normal_sq) * normal_t;
    }
    return p;
  };

  Eigen::VectorXd x = project_affine(Eigen::VectorXd::Zero(n * (n + 1) / 2));
  FeasibilityResult result;
  // Clipping eigenvalues at a positive shift aims at the interior, which ends
  // the run after finitely many steps when the intersection has interior.
  // Each stall shrinks the shift tenfold, down to the plain cone.
  double shift = std::max(tol, 1e-3);
  double checkpoint_gap = std::numeric_limits<double>::infinity();
  int next_check = 16;
  for (int it = 0; it < max_iters; ++it) {
    result.iterations = it + 1;
    const SymMatrix xm = smat(x, n);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xm.dense());
    const double min_eig = es.eigenvalues()(0);
    const double residual = spec.max_residual(xm);
    const double excess = half ? half->normal.dot(x) - half->level : 0.0;
    if (min_eig >= -tol && residual <= tol && excess <= tol) {
      result.feasible = true;
      result.x = xm;
      result.min_eigenvalue = min_eig;
      result.max_residual = residual;
      result.gap = 0.0;
      return result;
    }

    const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(shift);
    const Eigen::VectorXd y = svec(SymMatrix::from_dense(
        es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose(), 1e-8));
    const Eigen::VectorXd next = project_affine(y);
    const double step = (next - x).norm();
    result.gap = (y - next).norm();
    result.min_eigenvalue = min_eig;
    result.max_residual = residual;
    x = next;
    // Stalled: the gap levelled off over the last doubling window (it tends
    // to a positive distance when the sets are disjoint) or nothing moves.
    bool stalled = step <= 1e-3 * tol;
    if (it + 1 == next_check) {
      stalled = stalled || result.gap >= 0.9 * checkpoint_gap;
      checkpoint_gap = result.gap;
      next_check *= 2;
    }
    if (stalled) {
      if (shift == 0.0) break;
      shift = shift / 10.0 < tol ? 0.0 : shift / 10.0;
      checkpoint_gap = std::numeric_limits<double>::infinity();
      next_check = it + 1 + 16;
    }
  }
  result.x = smat(x, n);
  return result;
}

}  // namespace

EigenDecomposition eigh(const SymMatrix& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigh: decomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SymMatrix project_psd(const SymMatrix& m) {
  const EigenDecomposition e = eigh(m);
  const Eigen::VectorXd clipped = e.values.cwiseMax(0.0);
  return SymMatrix::from_dense(e.vectors * clipped.asDiagonal() * e.vectors.transpose(), 1e-8);
}

void canonicalize_sign(Eigen::VectorXd& v) {
  const double cutoff = 1e-12 * v.norm();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > cutoff) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

std::optional<Eigen::VectorXd> rank_one_factor(const SymMatrix& x, double tol) {
  const int n = x.size();
  if (n == 0) return std::nullopt;
  const EigenDecomposition e = eigh(x);
  const double lmax = e.values(n - 1);
  if (!(lmax > 0.0)) return std::nullopt;
  const double second = n >= 2 ? e.values(n - 2) : 0.0;
  if (second > tol * lmax || e.values(0) < -tol * lmax) return std::nullopt;
  Eigen::VectorXd v = std::sqrt(lmax) * e.vectors.col(n - 1);
  canonicalize_sign(v);
  return v;
}

SymMatrix MatrixPencil::at(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension()) {
    throw std::invalid_argument("MatrixPencil::at: dimension mismatch");
  }
  SymMatrix m = base;
  for (int i = 0; i < dimension(); ++i) {
    if (x[i] != 0.0) m += x[i] * params[i];
  }
  return m;
}

void MatrixPencil::validate() const {
  for (const auto& p : params) {
    if (p.size() != base.size()) throw std::invalid_argument("MatrixPencil: size mismatch");
  }
}

void SpectrahedronSpec::validate() const {
  for (const auto& c : constraints) {
    if (c.a.size() != n) throw std::invalid_argument("SpectrahedronSpec: constraint size mismatch");
  }
  if (pencil) {
    pencil->validate();
    if (pencil->size() != n) throw std::invalid_argument("SpectrahedronSpec: pencil size mismatch");
  }
}

double SpectrahedronSpec::max_residual(const SymMatrix& x) const {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, std::abs(frobenius(c.a, x) - c.rhs));
  return worst;
}

SpectrahedronSpec slice_from_pencil(const MatrixPencil& pencil) {
  pencil.validate();
  const int n = pencil.size();
  const int d = n * (n + 1) / 2;
  SpectrahedronSpec spec;
  spec.n = n;
  spec.pencil = pencil;

  Eigen::MatrixXd dirs(d, pencil.dimension());
  for (int i = 0; i < pencil.dimension(); ++i) dirs.col(i) = svec(pencil.params[i]);
  int rank = 0;
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(d, d);
  if (pencil.dimension() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs, Eigen::ComputeFullU);
    svd.setThreshold(1e-12);
    rank = static_cast<int>(svd.rank());
    u = svd.matrixU();
  }
  const Eigen::VectorXd base = svec(pencil.base);
  for (int c = rank; c < d; ++c) {
    const Eigen::VectorXd normal = u.col(c);
    spec.constraints.push_back({smat(normal, n), normal.dot(base)});
  }
  return spec;
}

MatrixPencil pencil_from_slice(int n, std::span<const AffineConstraint> constraints) {
  const int d = n * (n + 1) / 2;
  Eigen::VectorXd b;
  const Eigen::MatrixXd a = constraint_rows(n, constraints, b);
  MatrixPencil pencil;
  if (a.rows() == 0) {
    pencil.base = SymMatrix(n);
    for (int k = 0; k < d; ++k) pencil.params.push_back(smat(Eigen::VectorXd::Unit(d, k), n));
    return pencil;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const Eigen::VectorXd x0 = svd.solve(b);
  if ((a * x0 - b).norm() > 1e-9 * (1.0 + b.norm())) {
    throw std::invalid_argument("pencil_from_slice: inconsistent constraints");
  }
  pencil.base = smat(x0, n);
  const int rank = static_cast<int>(svd.rank());
  for (int k = rank; k < d; ++k) pencil.params.push_back(smat(svd.matrixV().col(k), n));
  return pencil;
}

bool pencil_contains(const MatrixPencil& pencil, const SymMatrix& x, double tol) {
  const int n = pencil.size();
  if (x.size() != n) throw std::invalid_argument("pencil_contains: size mismatch");
  const Eigen::VectorXd target = svec(x) - svec(pencil.base);
  double residual = target.norm();
  if (pencil.dimension() > 0) {
    Eigen::MatrixXd dirs(target.size(), pencil.dimension());
    for (int i = 0; i < pencil.dimension(); ++i) dirs.col(i) = svec(pencil.params[i]);
    const Eigen::VectorXd coef = dirs.completeOrthogonalDecomposition().solve(target);
    residual = (dirs * coef - target).norm();
  }
  if (residual > tol * (1.0 + x.frobenius_norm())) return false;
  return eigh(x).values(0) >= -tol;
}

FeasibilityResult feasibility(const SpectrahedronSpec& spec, double tol, int max_iters) {
  return alternating_projections(spec, std::nullopt, tol, max_iters);
}

MinimizeResult minimize_linear(const SymMatrix& c, const SpectrahedronSpec& spec, double tol,
                               int max_iters) {
  if (c.size() != spec.n) throw std::invalid_argument("minimize_linear: size mismatch");
  MinimizeResult result;
  const FeasibilityResult start = feasibility(spec, tol, max_iters);
  if (!start.feasible) return result;

  const Eigen::VectorXd normal = svec(c);
  auto level_feasible = [&](double t) {
    return alternating_projections(spec, HalfSpace{normal, t}, tol, max_iters);
  };

  double hi = frobenius(c, start.x);
  SymMatrix best = start.x;
  const double bound = spec.trace_bound.value_or(std::max(1.0, start.x.trace()));
  double lo = std::min(hi, -(1.0 + c.frobenius_norm()) * (1.0 + bound));
  int expansions = 0;
  for (;;) {
    const FeasibilityResult r = level_feasible(lo);
    ++result.bisection_steps;
    if (!r.feasible) break;
    hi = frobenius(c, r.x);
    best = r.x;
    if (++expansions > 6) {
      result.status = MinimizeResult::Status::kUnbounded;
      result.value = hi;
      result.x = best;
      return result;
    }
    lo = hi - 10.0 * std::abs(hi) - 1.0;
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const FeasibilityResult r = level_feasible(mid);
    ++result.bisection_steps;
    if (r.feasible) {
      hi = std::min(mid, frobenius(c, r.x));
      best = r.x;
    } else {
      lo = mid;
    }
  }
  result.status = MinimizeResult::Status::kOptimal;
  result.value = hi;
  result.x = best;
  return result;
}

}  // namespace pseudospec
