#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pseudospec {

/// Real symmetric matrix stored as its packed upper triangle, so symmetry
/// holds by construction. Indices are 0-based: matrix position p in the
/// 1-based convention is index p - 1.
class SymMatrix {
 public:
  struct Entry {
    int i = 0;
    int j = 0;
    double v = 0.0;
  };

  SymMatrix() = default;
  explicit SymMatrix(int n);

  static SymMatrix identity(int n);
  /// v v^T.
  static SymMatrix outer(std::span<const double> v);
  static SymMatrix outer(const Eigen::VectorXd& v);
  /// Symmetrizes (M + M^T) / 2. Throws std::invalid_argument if M is not
  /// square or its asymmetry exceeds sym_tol * (1 + |M|_F).
  static SymMatrix from_dense(const Eigen::MatrixXd& m, double sym_tol = 1e-12);
  static SymMatrix from_entries(int n, std::span<const Entry> upper);

  int size() const { return n_; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  void set(int i, int j, double v) { data_[index(i, j)] = v; }
  void add(int i, int j, double v) { data_[index(i, j)] += v; }

  Eigen::MatrixXd dense() const;
  /// Nonzero upper-triangle entries (i <= j), row-major.
  std::vector<Entry> entries() const;

  double trace() const;
  double frobenius_norm() const;
  /// v^T M v.
  double quadratic_form(std::span<const double> v) const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

  /// Packed storage, row-major upper triangle.
  std::span<const double> packed() const { return data_; }

 private:
  int index(int i, int j) const;

  int n_ = 0;
  std::vector<double> data_;
};

/// Frobenius pairing <A, B> = trace(AB).
double frobenius(const SymMatrix& a, const SymMatrix& b);

}  // namespace pseudospec
