#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pseudospec {

/// Per-variable exponents of a monomial. Entry i is the power of x_{i+1}.
using Exponents = std::vector<int>;

int total_degree(const Exponents& e);

/// Graded lexicographic order: lower total degree first, then lexicographic
/// on the exponent vector. Every container keyed by monomials in this library
/// uses this order, which fixes the output of all downstream constructions.
struct GradedLexLess {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial with double coefficients.
///
/// Terms with a zero coefficient are never stored, and every exponent vector
/// has exactly nvars() entries.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(int nvars);

  static Polynomial constant(int nvars, double c);
  /// c * x_{index+1}; index is 0-based.
  static Polynomial variable(int nvars, int index, double c = 1.0);
  static Polynomial monomial(Exponents e, double c = 1.0);

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Largest total degree of a stored term; 0 for the zero polynomial.
  int total_degree() const;
  double coefficient(const Exponents& e) const;
  double constant_term() const;

  /// Adds c * x^e, merging like terms and dropping exact zeros.
  void add_term(const Exponents& e, double c);

  /// d/dx_{var+1}; var is 0-based.
  Polynomial derivative(int var) const;

  /// Same polynomial viewed in a larger ring; new variables are appended.
  Polynomial extended(int new_nvars) const;

  double eval(std::span<const double> point) const;
  /// Sum of |c| * prod |x_i|^e_i. Scale for rounding-aware residual checks.
  double abs_eval(std::span<const double> point) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

 private:
  void check_compatible(const Polynomial& other) const;

  int nvars_ = 0;
  TermMap terms_;
};

/// x1, x2, ..., xn.
std::vector<std::string> default_var_names(int nvars, std::string_view prefix = "x");

/// Prints terms in descending graded-lex order with shortest round-trip
/// coefficients, e.g. "x1^2*x2 - 1". The zero polynomial prints as "0".
std::string to_string(const Polynomial& p, std::span<const std::string> var_names);

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position);
  /// Byte offset into the parsed text.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses sums and products of numbers and variables with `^` integer
/// powers, unary minus and parentheses. Throws ParseError on bad syntax or
/// an unknown variable name.
Polynomial parse_poly(std::string_view text, std::span<const std::string> var_names);

enum class Relation { kEq, kLt, kGt, kLe, kGe };

std::string_view to_string(Relation rel);
/// Accepts "=", "==", "<", ">", "<=", ">=".
Relation parse_relation(std::string_view text);

/// Whether `value rel 0` holds. The tolerance widens the closed relations
/// (=, <=, >=) only; strict relations are decided by sign.
bool satisfies(double value, Relation rel, double tol);

struct Constraint {
  Polynomial poly;
  Relation rel = Relation::kEq;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Conjunction of polynomial constraints over a shared variable set.
struct PolySystem {
  int nvars = 0;
  std::vector<std::string> var_names;
  std::vector<Constraint> constraints;

  /// Throws std::invalid_argument when a constraint or the name list
  /// disagrees with nvars.
  void validate() const;
  /// Every constraint holds at point. Equation residuals are compared
  /// against tol * (1 + abs_eval) so large points are not penalized by
  /// rounding.
  bool contains(std::span<const double> point, double tol) const;
  int max_degree() const;
};

/// Convenience builder: parses each (text, relation) pair over var_names.
PolySystem make_system(std::vector<std::string> var_names,
                       const std::vector<std::pair<std::string, Relation>>& constraints);

/// Homogeneous quadratic coefficients in x_0, ..., x_n with key (i, j), j <= i.
/// Label 0 is the homogenizing coordinate; label b >= 1 is x_b. A cross term
/// c * x_i x_j is stored once at (max, min) with coefficient c.
struct QuadCoeffs {
  int n = 0;
  std::map<std::pair<int, int>, double> entries;

  double at(int i, int j) const;
  /// sum f_ij x_i x_j for a point (x_0, ..., x_n).
  double eval_homogeneous(std::span<const double> x) const;
};

/// Throws std::domain_error when p has total degree above 2.
QuadCoeffs quad_coeffs(const Polynomial& p);
/// Dehomogenizes at x_0 = 1.
Polynomial from_quad_coeffs(const QuadCoeffs& q);

}  // namespace pseudospec
