#include "pseudospec/sym_matrix.h"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pseudospec {

SymMatrix::SymMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0) {
  if (n < 0) throw std::invalid_argument("SymMatrix: negative size");
}

int SymMatrix::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) throw std::out_of_range("SymMatrix: index out of range");
  // Row i of the packed upper triangle starts after rows 0..i-1.
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v) {
  const int n = static_cast<int>(v.size());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) m.set(i, j, v[i] * v[j]);
  }
  return m;
}

SymMatrix SymMatrix::outer(const Eigen::VectorXd& v) {
  return outer(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m, double sym_tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix::from_dense: not square");
  const double asym = (m - m.transpose()).norm();
  if (asym > sym_tol * (1.0 + m.norm())) {
    throw std::invalid_argument("SymMatrix::from_dense: matrix is not symmetric");
  }
  const int n = static_cast<int>(m.rows());
  SymMatrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
  return out;
}

SymMatrix SymMatrix::from_entries(int n, std::span<const Entry> upper) {
  SymMatrix out(n);
  for (const auto& e : upper) {
    if (e.i > e.j) throw std::invalid_argument("SymMatrix::from_entries: entry below diagonal");
    out.add(e.i, e.j, e.v);
  }
  return out;
}

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) m(i, j) = m(j, i) = (*this)(i, j);
  }
  return m;
}

std::vector<SymMatrix::Entry> SymMatrix::entries() const {
  std::vector<Entry> out;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (v != 0.0) out.push_back({i, j, v});
    }
  }
  return out;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::frobenius_norm() const { return std::sqrt(frobenius(*this, *this)); }

double SymMatrix::quadratic_form(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != n_) {
    throw std::invalid_argument("SymMatrix::quadratic_form: dimension mismatch");
  }
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    sum += (*this)(i, i) * v[i] * v[i];
    for (int j = i + 1; j < n_; ++j) sum += 2.0 * (*this)(i, j) * v[i] * v[j];
  }
  return sum;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (n_ != other.n_) throw std::invalid_argument("SymMatrix: size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  if (n_ != other.n_) throw std::invalid_argument("SymMatrix: size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

double frobenius(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("frobenius: size mismatch");
  double sum = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    sum += a(i, i) * b(i, i);
    for (int j = i + 1; j < a.size(); ++j) sum += 2.0 * a(i, j) * b(i, j);
  }
  return sum;
}

}  // namespace pseudospec
