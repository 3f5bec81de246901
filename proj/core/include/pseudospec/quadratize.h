#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pseudospec/poly.h"

namespace pseudospec {

/// One defining equation u_a - x_b * v = 0 of an auxiliary variable.
struct ESetEntry {
  int divisor = 0;        // 0-based index of x_b among the original variables
  int quotient_var = 0;   // 0-based index of v in the extended variable list
  Polynomial poly;        // u_a - x_b * v over the extended variables
};

/// Auxiliary variables u_1..u_M introduced by quadratization. Extended
/// variable order is (x_1, ..., x_n, u_1, ..., u_M).
struct SubstitutionTable {
  int n_original = 0;
  /// defs[a] is the monomial in the original variables that u_{a+1} stands for.
  std::vector<Exponents> defs;
  /// e_sets[a] holds one entry per distinct original variable dividing defs[a].
  std::vector<std::vector<ESetEntry>> e_sets;

  int aux_count() const { return static_cast<int>(defs.size()); }
  int extended_nvars() const { return n_original + aux_count(); }
  /// Extended variable index that represents monomial e: an original
  /// variable for degree 1, an auxiliary for degree >= 2.
  std::optional<int> variable_for(const Exponents& e) const;
};

/// Degree-<=2 system equivalent to a polynomial system.
///
/// `base` lists the rewritten original constraints first (same relations as
/// the input, `n_rewritten` of them) and then every E-set equation.
struct QuadSystem {
  PolySystem base;
  SubstitutionTable table;
  int n_original = 0;
  int n_rewritten = 0;

  std::span<const Constraint> rewritten() const;
  std::span<const Constraint> e_equations() const;
};

/// Rewrites every monomial of degree >= 3 as x_b * u_c, with x_b the
/// lowest-indexed variable of the monomial and u_c the auxiliary for the
/// quotient. Auxiliaries are created for the closure of all such quotients
/// under division by single variables, numbered in ascending graded-lex order.
QuadSystem quadratize(const PolySystem& sys);

/// Table for the given auxiliary monomials (sorted into graded-lex order)
/// with one E-set entry per dividing variable. Throws std::invalid_argument
/// when a monomial has degree below 2, repeats, or has a degree >= 2
/// quotient missing from the list.
SubstitutionTable make_substitution_table(int n_original, std::vector<Exponents> defs);

/// Rebuilds `base` from the rewritten constraints and the table's E-sets.
QuadSystem assemble_quad_system(PolySystem rewritten, SubstitutionTable table);

/// The original-variable system obtained by substituting each u_a by its
/// monomial in the rewritten constraints.
PolySystem recover_original(const QuadSystem& q);

/// (p, u_1(p), ..., u_M(p)).
std::vector<double> lift_point(std::span<const double> p, const SubstitutionTable& table);

struct EquivalenceViolation {
  enum class Kind { kMembership, kRewrite, kESet, kConverse };
  Kind kind = Kind::kMembership;
  std::size_t sample = 0;
  int constraint = -1;
  double residual = 0.0;
};

struct EquivalenceReport {
  std::size_t samples_checked = 0;
  std::size_t feasible_samples = 0;
  std::size_t extended_checked = 0;
  double max_residual = 0.0;
  std::vector<EquivalenceViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Sampling check of R(F) = projection of R(F~).
///
/// For every sample p, membership of p in the original system must match
/// membership of lift_point(p) in the quadratic one; rewritten constraints
/// must reproduce the original values and E-set equations must vanish, all
/// to tol times a rounding scale. Each extended point that satisfies the
/// quadratic system must project to a point of the original system.
EquivalenceReport verify_equivalence(const PolySystem& sys, const QuadSystem& q,
                                     std::span<const std::vector<double>> samples,
                                     std::span<const std::vector<double>> extended = {},
                                     double tol = 1e-9);

}  // namespace pseudospec
