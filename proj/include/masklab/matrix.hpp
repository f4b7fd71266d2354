#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace masklab {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Dense complex matrix with row-major storage. The one carrier used for
/// operators, maskers, marginals and density matrices throughout the library.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  /// Zero matrix of the given shape.
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
  }

  ComplexMatrix(std::size_t rows, std::size_t cols, ComplexVector entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    if (entries_.size() != rows_ * cols_)
      throw std::invalid_argument("ComplexMatrix: entry count does not match shape");
    for (const Complex& z : entries_)
      if (!is_finite(z))
        throw std::invalid_argument("ComplexMatrix: non-finite entry");
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    if (rows_ == 0 || cols_ == 0)
      throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_)
        throw std::invalid_argument("ComplexMatrix: ragged initializer");
      for (Complex z : row) {
        if (!is_finite(z))
          throw std::invalid_argument("ComplexMatrix: non-finite entry");
        entries_.push_back(z);
      }
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<double>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix from_column(const ComplexVector& v) {
    ComplexMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  Complex operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const ComplexVector& entries() const { return entries_; }
  Complex* data() { return entries_.data(); }
  const Complex* data() const { return entries_.data(); }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  ComplexMatrix conjugate() const {
    ComplexMatrix out = *this;
    for (Complex& z : out.entries_) z = std::conj(z);
    return out;
  }

  Complex trace() const {
    if (!square()) throw std::invalid_argument("trace: matrix not square");
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : entries_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const Complex& z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "+=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "-=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (Complex& z : entries_) z *= s;
    return *this;
  }

 private:
  void require_same_shape(const ComplexMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("ComplexMatrix: shape mismatch in ") + op);
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ComplexVector entries_;
};

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
inline ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
inline ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= Complex(s, 0.0); }
inline ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex(s, 0.0); }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("ComplexMatrix: inner dimensions do not match");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline ComplexVector operator*(const ComplexMatrix& m, const ComplexVector& v) {
  if (m.cols() != v.size())
    throw std::invalid_argument("ComplexMatrix: vector length does not match columns");
  ComplexVector out(m.rows(), Complex{0.0, 0.0});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.square() && max_abs_diff(m, m.adjoint()) <= tol;
}

/// (m + m†)/2 — removes the anti-Hermitian roundoff of a product chain.
inline ComplexMatrix hermitize(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("hermitize: matrix not square");
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return out;
}

inline ComplexVector column(const ComplexMatrix& m, std::size_t j) {
  ComplexVector v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, j);
  return v;
}

inline void set_column(ComplexMatrix& m, std::size_t j, const ComplexVector& v) {
  if (v.size() != m.rows())
    throw std::invalid_argument("set_column: length mismatch");
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = v[i];
}

inline ComplexMatrix columns_matrix(const std::vector<ComplexVector>& cols) {
  if (cols.empty()) throw std::invalid_argument("columns_matrix: no columns");
  ComplexMatrix m(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) set_column(m, j, cols[j]);
  return m;
}

// -- vector helpers --------------------------------------------------------

inline double vec_norm(const ComplexVector& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

/// ⟨a|b⟩, conjugate-linear in the first argument.
inline Complex inner_product(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner_product: length mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline ComplexVector scaled(ComplexVector v, Complex s) {
  for (Complex& z : v) z *= s;
  return v;
}

inline ComplexVector normalized(const ComplexVector& v) {
  const double n = vec_norm(v);
  if (n <= 0.0) throw std::invalid_argument("normalized: zero vector");
  return scaled(v, Complex(1.0 / n, 0.0));
}

inline ComplexVector vec_add(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_add: length mismatch");
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline ComplexVector vec_sub(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub: length mismatch");
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/// |u⟩⟨v|
inline ComplexMatrix outer_product(const ComplexVector& u, const ComplexVector& v) {
  ComplexMatrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

inline ComplexVector basis_vector(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("basis_vector: index out of range");
  ComplexVector v(dim, Complex{0.0, 0.0});
  v[index] = 1.0;
  return v;
}

}  // namespace masklab
