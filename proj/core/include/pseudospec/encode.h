#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pseudospec/poly.h"
#include "pseudospec/quadratize.h"
#include "pseudospec/spectra.h"
#include "pseudospec/sym_matrix.h"

namespace pseudospec {

/// Slot assignment of the lifted vector v. Matrix positions are 1-based in
/// the mathematical convention; every accessor here returns the 0-based
/// index (position - 1).
///
/// Strict layout, N = 3k + n + 1:
///   position 1            x_0 (homogenizing coordinate)
///   positions 2..n+1      x_1..x_n
///   positions n+2..n+k+1  y_1..y_k
///   positions ..n+2k+1    z_1..z_k
///   positions ..n+3k+1    r_1..r_k
///
/// Compact layout, N = n + m + 2: x_0, x_1..x_n, z_1..z_m, then slack w.
struct VariableLayout {
  enum class Kind { kStrict, kCompact };

  Kind kind = Kind::kStrict;
  int n = 0;          // size of the x block
  int n_project = 0;  // leading x coordinates recovered by the projection
  int k = 0;          // strict: inequality/equation pairs
  int m = 0;          // compact: squared-slack count
  int N = 0;

  static VariableLayout strict(int n, int n_project, int k);
  static VariableLayout compact(int n, int n_project, int m);

  int x0() const { return 0; }
  /// Label b in 0..n (b = 0 is x_0).
  int label(int b) const { return b; }
  int y(int a) const { return n + a; }
  int z(int a) const { return kind == Kind::kStrict ? n + k + a : n + a; }
  int r(int a) const { return n + 2 * k + a; }
  int w() const { return N - 1; }

  /// Slot names for printing, e.g. {"x0", "x1", "y1", "z1", "r1"}.
  std::vector<std::string> slot_names(std::span<const std::string> x_names) const;
  friend bool operator==(const VariableLayout&, const VariableLayout&) = default;
};

std::string_view to_string(VariableLayout::Kind kind);

// Constraint matrix families, all of size layout.N.

/// A_{i,j} over coordinate labels 0..n: 1/2 at the symmetric pair of
/// positions (i+1, j+1); for i == j the diagonal unit A_b.
SymMatrix pair_matrix(const VariableLayout& layout, int i, int j);
/// 1/2 at the pair coupling x_0 and y_a; <v v^T, Y_a> = v_1 y_a.
SymMatrix y_matrix(const VariableLayout& layout, int a);
/// Diagonal unit at r_a; <v v^T, g_a> = r_a^2.
SymMatrix g_matrix(const VariableLayout& layout, int a);
/// 1/2 at the pair coupling y_a and z_a; <v v^T, YZ_a> = y_a z_a.
SymMatrix yz_matrix(const VariableLayout& layout, int a);
/// sum f_ij A_{i,j} for a quadratic over the x block.
SymMatrix quadratic_matrix(const VariableLayout& layout, const QuadCoeffs& coeffs);

struct EncodingConstraint {
  enum class Kind { kF, kQ, kG, kA0, kYZ, kTrace };
  Kind kind = Kind::kF;
  int index = 0;  // 1-based family index a; 0 for A0 and trace
  SymMatrix matrix;
  double rhs = 0.0;
};

std::string_view to_string(EncodingConstraint::Kind kind);
EncodingConstraint::Kind parse_constraint_kind(std::string_view text);

/// Affine constraints <X, C_i> = rhs_i on the PSD cone whose rank-one
/// members project onto the encoded set.
struct PseudoSpecEncoding {
  VariableLayout layout;
  std::vector<EncodingConstraint> constraints;
  /// A_{0,b} for b = 1..n_project.
  std::vector<SymMatrix> projection;
  std::optional<double> trace_bound;

  void validate() const;
  std::vector<double> residuals(const SymMatrix& x) const;
  SpectrahedronSpec spectrahedron() const;
  int count_rhs(double rhs) const;
};

/// Equation-only form of a system with equations and strict inequalities.
struct StrictSystem {
  VariableLayout layout;
  /// f_a over the x block, padded with the constant 1.
  std::vector<Polynomial> inequalities;
  /// q_a over the x block, padded with the zero polynomial.
  std::vector<Polynomial> equations;
  /// q_a = 0, f_a - y_a = 0, y_a - r_a^2 = 0, y_a z_a - 1 = 0 over the slot
  /// variables (x, y, z, r).
  PolySystem equation_system;
  std::vector<std::string> x_names;
};

/// A system whose constraints are all equations or strict inequalities,
/// obtained from a quadratic system by negating < and <= and replacing each
/// f >= 0 with f - s^2 = 0 for a fresh slack s appended to the x block.
struct NormalizedSystem {
  PolySystem system;
  SubstitutionTable table;
  int n_project = 0;
  /// slack_polys[j] is the >= 0 polynomial (over x and u) that s_j squares to.
  std::vector<Polynomial> slack_polys;

  /// (p, u(p), s(p)); throws LiftError when a slack polynomial is negative.
  std::vector<double> lift(std::span<const double> p) const;
};

NormalizedSystem normalize_relations(const QuadSystem& q);

/// Throws std::invalid_argument for any relation other than = and >.
StrictSystem strict_to_equations(const NormalizedSystem& sys);
StrictSystem strict_to_equations(const PolySystem& sys, int n_project);

/// F_a, Q_a, G_a (rhs 0), then A_0, then YZ_a (rhs 1).
PseudoSpecEncoding build_encoding(const StrictSystem& sys);

class LiftError : public std::domain_error {
 public:
  LiftError(const std::string& what, int index);
  /// 1-based constraint index, or 0 when the failure is not tied to one.
  int index() const { return index_; }

 private:
  int index_;
};

struct Lift {
  Eigen::VectorXd v;
  SymMatrix x;
};

/// v = (1, x, f(1,x), 1/f(1,x), sqrt(f(1,x))) and X = v v^T. Throws
/// LiftError naming the first a with f_a(1, x) <= 0.
Lift lift(std::span<const double> x_block, const StrictSystem& sys);

/// (<X, A_{0,1}>, ..., <X, A_{0,n_project}>).
std::vector<double> project(const SymMatrix& x, const PseudoSpecEncoding& enc);

struct MembershipReport {
  bool psd = false;
  bool rank_one = false;
  bool constraints_ok = false;
  double min_eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double max_residual = 0.0;
  int worst_constraint = -1;

  bool ok() const { return psd && rank_one && constraints_ok; }
};

/// PSD: lambda_min >= -tol (1 + |X|_F). Rank one: lambda_2 <= tol *
/// lambda_max with lambda_max > 0. Constraints: every residual <= tol (1 +
/// |X|_F).
MembershipReport check_rank_one_member(const SymMatrix& x, const PseudoSpecEncoding& enc,
                                       double tol);

/// Rank-one members found by Gauss-Newton on <v v^T, C_i> = rhs_i from
/// random starts with v_1 = +-1. Returns up to `count` factors v; solutions
/// with |v|^2 > 1e4 (near the boundary of a strict set) are dropped, since
/// the residual test no longer pins down their projection.
std::vector<Eigen::VectorXd> sample_rank_one_members(const PseudoSpecEncoding& enc,
                                                     std::mt19937_64& rng, int count,
                                                     int max_attempts);

/// Full strict pipeline from a quadratic system.
struct StrictEncoding {
  NormalizedSystem normalized;
  StrictSystem strict;
  PseudoSpecEncoding encoding;

  /// Lift of a point in the original coordinates.
  Lift lift_original(std::span<const double> p) const;
};

StrictEncoding encode_strict(const QuadSystem& q);

struct CompactOptions {
  /// Trace bound B. When absent it is chosen as 1.5 (1 + max |v|^2) over
  /// rejection samples drawn from `box`.
  std::optional<double> trace_bound;
  /// Per-coordinate sampling box in the original variables.
  std::vector<std::pair<double, double>> box;
  int samples = 10'000;
  std::uint64_t seed = 0;
};

/// Compact variant: each f >= 0 becomes f - z^2 = 0, and a slack w with
/// |(x_0, x, z, w)|^2 = B puts every lifted matrix on the plane trace = B.
struct CompactEncoding {
  QuadSystem source;
  /// Base-constraint index that each z_i squares to.
  std::vector<int> z_sources;
  PseudoSpecEncoding encoding;
  /// Largest squared norm of (x_0, x, z) over feasible samples (0 if unsampled).
  double max_sampled_norm = 0.0;
  std::size_t feasible_samples = 0;

  Lift lift_original(std::span<const double> p) const;
};

/// Throws std::invalid_argument on relations other than >= and =, and when
/// an explicit B is below a sampled lift norm. Throws std::runtime_error when
/// B must be selected but no sample is feasible.
CompactEncoding encode_compact(const QuadSystem& q, const CompactOptions& options);
CompactEncoding encode_compact(const PolySystem& sys, const CompactOptions& options);

}  // namespace pseudospec
