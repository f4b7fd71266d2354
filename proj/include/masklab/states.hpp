#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "masklab/linalg.hpp"
#include "masklab/matrix.hpp"

namespace masklab {

using Rng = std::mt19937_64;

/// Unit complex vector.
class PureState {
 public:
  PureState(std::size_t dim, ComplexVector amplitudes, double norm_tol = 1e-12)
      : dim_(dim), amplitudes_(std::move(amplitudes)) {
    validate(norm_tol);
  }

  // members initialize in declaration order, so dim_ reads the size before
  // the vector is moved from
  explicit PureState(ComplexVector amplitudes)
      : dim_(amplitudes.size()), amplitudes_(std::move(amplitudes)) {
    validate(1e-12);
  }

  /// Normalizes before constructing; rejects (near-)zero vectors.
  static PureState normalized_from(const ComplexVector& v) {
    return PureState(v.size(), normalized(v));
  }

  std::size_t dim() const { return dim_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::size_t i) const { return amplitudes_[i]; }

  /// |psi><psi|
  ComplexMatrix projector() const { return outer_product(amplitudes_, amplitudes_); }

 private:
  void validate(double norm_tol) const {
    if (dim_ == 0) throw std::invalid_argument("PureState: dimension must be positive");
    if (amplitudes_.size() != dim_)
      throw std::invalid_argument("PureState: amplitude count does not match dimension");
    for (const Complex& z : amplitudes_)
      if (!is_finite(z)) throw std::invalid_argument("PureState: non-finite amplitude");
    if (std::abs(vec_norm(amplitudes_) - 1.0) > norm_tol)
      throw std::invalid_argument("PureState: vector is not normalized");
  }

  std::size_t dim_;
  ComplexVector amplitudes_;
};

/// Hermitian, positive-semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  DensityMatrix(std::size_t dim, ComplexMatrix matrix, double herm_tol = 1e-12,
                double trace_tol = 1e-12, double psd_tol = 1e-10)
      : dim_(dim), matrix_(std::move(matrix)) {
    validate(herm_tol, trace_tol, psd_tol);
  }

  explicit DensityMatrix(ComplexMatrix matrix)
      : dim_(matrix.rows()), matrix_(std::move(matrix)) {
    validate(1e-12, 1e-12, 1e-10);
  }

  static DensityMatrix pure(const PureState& psi) {
    return DensityMatrix(psi.dim(), psi.projector());
  }

  std::size_t dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  void validate(double herm_tol, double trace_tol, double psd_tol) const {
    if (dim_ == 0) throw std::invalid_argument("DensityMatrix: dimension must be positive");
    if (matrix_.rows() != dim_ || matrix_.cols() != dim_)
      throw std::invalid_argument("DensityMatrix: matrix shape does not match dimension");
    if (!is_hermitian(matrix_, herm_tol))
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    if (std::abs(matrix_.trace() - Complex{1.0, 0.0}) > trace_tol)
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    const EighResult eig = eigh(hermitize(matrix_));
    if (eig.eigenvalues.back() < -psd_tol)
      throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }

  std::size_t dim_;
  ComplexMatrix matrix_;
};

/// Schmidt form of a bipartite pure state: sum_j coeff_j |e_j>|f_j>.
struct SchmidtForm {
  std::vector<double> coefficients;  // descending, strictly positive
  ComplexMatrix left_vectors;        // d_a x rank, orthonormal columns
  ComplexMatrix right_vectors;       // d_b x rank, orthonormal columns
  std::size_t rank = 0;
};

inline SchmidtForm schmidt_decompose(const PureState& psi, std::size_t d_a,
                                     std::size_t d_b, double cutoff = 1e-10) {
  if (psi.dim() != d_a * d_b)
    throw std::invalid_argument("schmidt_decompose: state dimension does not match d_a*d_b");
  const RawSchmidt raw = schmidt_raw(psi.amplitudes(), d_a, d_b, cutoff);
  SchmidtForm out;
  out.coefficients = raw.coefficients;
  out.left_vectors = raw.left;
  out.right_vectors = raw.right;
  out.rank = raw.coefficients.size();
  return out;
}

/// Number of Schmidt coefficients above the rank cutoff; 1 means product state.
inline std::size_t schmidt_rank(const PureState& psi, std::size_t d_a, std::size_t d_b,
                                double cutoff = 1e-10) {
  if (psi.dim() != d_a * d_b)
    throw std::invalid_argument("schmidt_rank: state dimension does not match d_a*d_b");
  ComplexMatrix m(d_a, d_b);
  for (std::size_t i = 0; i < d_a; ++i)
    for (std::size_t k = 0; k < d_b; ++k) m(i, k) = psi.amplitude(i * d_b + k);
  std::size_t rank = 0;
  for (double s : svd(m).singular_values)
    if (s > cutoff) ++rank;
  return rank;
}

// -- random sampling ----------------------------------------------------------

inline Complex gaussian_complex(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double re = gauss(rng);
  const double im = gauss(rng);
  return Complex(re, im);
}

inline PureState random_pure(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("random_pure: dimension must be positive");
  ComplexVector v(dim);
  for (Complex& z : v) z = gaussian_complex(rng);
  return PureState::normalized_from(v);
}

inline PureState random_pure(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure(dim, rng);
}

inline DensityMatrix random_density(std::size_t dim, std::size_t rank, Rng& rng) {
  if (dim == 0 || rank == 0 || rank > dim)
    throw std::invalid_argument("random_density: need 0 < rank <= dim");
  ComplexMatrix v(dim, rank);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < rank; ++j) v(i, j) = gaussian_complex(rng);
  ComplexMatrix rho = v * v.adjoint();
  rho *= Complex(1.0 / rho.trace().real(), 0.0);
  return DensityMatrix(dim, hermitize(rho));
}

inline DensityMatrix random_density(std::size_t dim, std::size_t rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(dim, rank, rng);
}

inline ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) g(i, j) = gaussian_complex(rng);
  return orthonormalize_columns(g);
}

inline ComplexMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(dim, rng);
}

}  // namespace masklab
