#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "masklab/matrix.hpp"

namespace masklab {

namespace detail {

using EigenRowMajor =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const EigenRowMajor> as_eigen(const ComplexMatrix& m) {
  return Eigen::Map<const EigenRowMajor>(
      m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
  ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

}  // namespace detail

// -- tensor products ---------------------------------------------------------

/// Kronecker product. System A is the slow (leftmost) index throughout the
/// library: entry ((i*rows_b + k), (j*cols_b + l)) = a(i,j) * b(k,l).
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

/// Tensor product of vectors with the same index convention.
inline ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) out[i * b.size() + k] = a[i] * b[k];
  return out;
}

// -- partial trace -----------------------------------------------------------

enum class TraceSide { TraceOutB, TraceOutA };

/// Partial trace of a (d_a*d_b) x (d_a*d_b) matrix over one tensor factor.
/// TraceOutB keeps the d_a x d_a block structure: out(i,j) = sum_k m(i*d_b+k, j*d_b+k).
/// TraceOutA keeps d_b x d_b: out(k,l) = sum_i m(i*d_b+k, i*d_b+l).
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t d_a,
                                   std::size_t d_b, TraceSide side) {
  const std::size_t dim = d_a * d_b;
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument("partial_trace: matrix shape does not match d_a*d_b");
  if (side == TraceSide::TraceOutB) {
    ComplexMatrix out(d_a, d_a);
    for (std::size_t i = 0; i < d_a; ++i)
      for (std::size_t j = 0; j < d_a; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < d_b; ++k) s += m(i * d_b + k, j * d_b + k);
        out(i, j) = s;
      }
    return out;
  }
  ComplexMatrix out(d_b, d_b);
  for (std::size_t k = 0; k < d_b; ++k)
    for (std::size_t l = 0; l < d_b; ++l) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < d_a; ++i) s += m(i * d_b + k, i * d_b + l);
      out(k, l) = s;
    }
  return out;
}

/// Single-party marginal of a multiparty pure state (parties ordered slow to
/// fast, dims[p] the local dimension of party p). Works on the state vector
/// directly, never forming the full density matrix.
inline ComplexMatrix single_party_marginal(const ComplexVector& state,
                                           const std::vector<std::size_t>& dims,
                                           std::size_t party) {
  if (party >= dims.size())
    throw std::invalid_argument("single_party_marginal: party index out of range");
  std::size_t total = 1;
  for (std::size_t d : dims) total *= d;
  if (state.size() != total)
    throw std::invalid_argument("single_party_marginal: state length does not match dims");
  std::size_t left = 1, right = 1;
  for (std::size_t p = 0; p < party; ++p) left *= dims[p];
  for (std::size_t p = party + 1; p < dims.size(); ++p) right *= dims[p];
  const std::size_t n = dims[party];
  ComplexMatrix out(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Complex s = 0.0;
      for (std::size_t l = 0; l < left; ++l)
        for (std::size_t r = 0; r < right; ++r)
          s += state[(l * n + a) * right + r] * std::conj(state[(l * n + b) * right + r]);
      out(a, b) = s;
    }
  return out;
}

// -- spectral decompositions -------------------------------------------------

struct EighResult {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // orthonormal columns, matching order
};

/// Hermitian eigendecomposition, eigenvalues descending.
inline EighResult eigh(const ComplexMatrix& m, double herm_tol = 1e-10) {
  if (!m.square()) throw std::invalid_argument("eigh: matrix not square");
  if (!is_hermitian(m, herm_tol)) throw std::invalid_argument("eigh: matrix not Hermitian");
  Eigen::MatrixXcd h = detail::as_eigen(m);
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigh: eigensolver did not converge");
  const std::size_t n = m.rows();
  EighResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Index src = static_cast<Eigen::Index>(n - 1 - j);  // ascending -> descending
    out.eigenvalues[j] = solver.eigenvalues()(src);
    for (std::size_t i = 0; i < n; ++i)
      out.eigenvectors(i, j) = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
  }
  return out;
}

struct SvdResult {
  ComplexMatrix u;                     // left singular vectors, thin
  std::vector<double> singular_values; // descending
  ComplexMatrix v;                     // right singular vectors, thin; m = u diag(s) v†
};

inline SvdResult svd(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(detail::as_eigen(m),
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = detail::from_eigen(solver.matrixU());
  out.v = detail::from_eigen(solver.matrixV());
  const auto& s = solver.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  return out;
}

inline double min_singular_value(const ComplexMatrix& m) {
  const auto s = svd(m).singular_values;
  return s.empty() ? 0.0 : s.back();
}

/// S†S = I within tol.
inline bool is_isometry(const ComplexMatrix& m, double tol = 1e-10) {
  if (m.rows() < m.cols()) return false;
  const ComplexMatrix gram = m.adjoint() * m;
  return max_abs_diff(gram, ComplexMatrix::identity(m.cols())) <= tol;
}

/// Inverse square root of a Hermitian positive-definite matrix:
/// the returned R satisfies R*m*R = I.
inline ComplexMatrix inv_sqrt_psd(const ComplexMatrix& m, double tol = 1e-10) {
  const EighResult eig = eigh(m);
  if (eig.eigenvalues.back() <= tol)
    throw std::invalid_argument("inv_sqrt_psd: matrix is singular or indefinite");
  const std::size_t n = m.rows();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k)) /
             std::sqrt(eig.eigenvalues[k]);
      out(i, j) = s;
    }
  return out;
}

// -- orthonormalization ------------------------------------------------------

/// Modified Gram-Schmidt with a re-orthogonalization pass. Throws when the
/// columns are linearly dependent at the cutoff.
inline ComplexMatrix orthonormalize_columns(const ComplexMatrix& m, double cutoff = 1e-10) {
  std::vector<ComplexVector> basis;
  basis.reserve(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    ComplexVector v = column(m, j);
    for (int pass = 0; pass < 2; ++pass)
      for (const ComplexVector& u : basis) {
        const Complex proj = inner_product(u, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
      }
    const double n = vec_norm(v);
    if (n <= cutoff)
      throw std::invalid_argument("orthonormalize_columns: columns are linearly dependent");
    basis.push_back(scaled(v, Complex(1.0 / n, 0.0)));
  }
  return columns_matrix(basis);
}

/// Extends orthonormal columns to a full orthonormal basis by orthogonalizing
/// the standard basis vectors against them in index order.
inline ComplexMatrix complete_orthonormal_basis(const ComplexMatrix& cols,
                                                double cutoff = 1e-8) {
  const std::size_t dim = cols.rows();
  if (cols.cols() > dim)
    throw std::invalid_argument("complete_orthonormal_basis: more columns than dimension");
  std::vector<ComplexVector> basis;
  basis.reserve(dim);
  for (std::size_t j = 0; j < cols.cols(); ++j) basis.push_back(column(cols, j));
  for (std::size_t t = 0; t < dim && basis.size() < dim; ++t) {
    ComplexVector v = basis_vector(dim, t);
    for (int pass = 0; pass < 2; ++pass)
      for (const ComplexVector& u : basis) {
        const Complex proj = inner_product(u, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
      }
    const double n = vec_norm(v);
    if (n > cutoff) basis.push_back(scaled(v, Complex(1.0 / n, 0.0)));
  }
  if (basis.size() != dim)
    throw std::runtime_error("complete_orthonormal_basis: completion failed");
  return columns_matrix(basis);
}

/// Unitary dilation of an isometry S : C^{d_a} -> C^{d_a * d_b}. The result
/// U acts on the composite space and satisfies U(|psi>|b>) = S|psi> where |b>
/// is the chosen ancilla basis state; the remaining columns are an orthonormal
/// basis of ker(S†), obtained deterministically from the standard basis.
inline ComplexMatrix extend_to_unitary(const ComplexMatrix& isometry, std::size_t d_a,
                                       std::size_t d_b, std::size_t ancilla_index,
                                       double tol = 1e-10) {
  const std::size_t dim = d_a * d_b;
  if (isometry.rows() != dim || isometry.cols() != d_a)
    throw std::invalid_argument("extend_to_unitary: isometry shape does not match dims");
  if (ancilla_index >= d_b)
    throw std::invalid_argument("extend_to_unitary: ancilla index out of range");
  if (!is_isometry(isometry, tol))
    throw std::invalid_argument("extend_to_unitary: input is not an isometry");

  const ComplexMatrix full = complete_orthonormal_basis(isometry);
  ComplexMatrix u(dim, dim);
  for (std::size_t i = 0; i < d_a; ++i)
    set_column(u, i * d_b + ancilla_index, column(isometry, i));
  std::size_t next = d_a;  // kernel columns follow the range columns in `full`
  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t a = c / d_b;
    const std::size_t b = c % d_b;
    if (b == ancilla_index && a < d_a) continue;
    set_column(u, c, column(full, next++));
  }
  return u;
}

// -- Schmidt decomposition (raw vector form) ----------------------------------

struct RawSchmidt {
  std::vector<double> coefficients;  // descending, > cutoff
  ComplexMatrix left;                // d_a x rank
  ComplexMatrix right;               // d_b x rank
};

/// Fixes the global phase so the largest-magnitude component is real positive.
inline ComplexVector fix_global_phase(const ComplexVector& v) {
  std::size_t imax = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best <= 0.0) return v;
  return scaled(v, std::conj(v[imax]) / best);
}

/// Schmidt decomposition of a bipartite vector of length d_a*d_b. The input's
/// global phase is fixed first (largest-magnitude amplitude real positive), and
/// each left vector's largest component is made real positive, with the
/// compensating phase pushed into the matching right vector. Coefficients at or
/// below the cutoff are dropped.
inline RawSchmidt schmidt_raw(const ComplexVector& psi, std::size_t d_a, std::size_t d_b,
                              double cutoff = 1e-10) {
  if (psi.size() != d_a * d_b)
    throw std::invalid_argument("schmidt_raw: vector length does not match d_a*d_b");
  const ComplexVector fixed = fix_global_phase(psi);
  ComplexMatrix m(d_a, d_b);
  for (std::size_t i = 0; i < d_a; ++i)
    for (std::size_t k = 0; k < d_b; ++k) m(i, k) = fixed[i * d_b + k];
  const SvdResult dec = svd(m);

  std::size_t rank = 0;
  while (rank < dec.singular_values.size() && dec.singular_values[rank] > cutoff) ++rank;
  if (rank == 0) throw std::invalid_argument("schmidt_raw: zero vector");

  RawSchmidt out;
  out.coefficients.assign(dec.singular_values.begin(), dec.singular_values.begin() + rank);
  out.left = ComplexMatrix(d_a, rank);
  out.right = ComplexMatrix(d_b, rank);
  for (std::size_t j = 0; j < rank; ++j) {
    ComplexVector e = column(dec.u, j);
    // m = u diag(s) v†, so the B-side vector is the conjugate of v's column.
    ComplexVector f(d_b);
    for (std::size_t k = 0; k < d_b; ++k) f[k] = std::conj(dec.v(k, j));
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (std::abs(e[i]) > best) {
        best = std::abs(e[i]);
        imax = i;
      }
    const Complex phase = e[imax] / best;
    e = scaled(e, std::conj(phase));
    f = scaled(f, phase);
    set_column(out.left, j, e);
    set_column(out.right, j, f);
  }
  return out;
}

}  // namespace masklab
