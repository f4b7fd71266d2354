#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "masklab/linalg.hpp"
#include "masklab/matrix.hpp"
#include "masklab/states.hpp"

namespace masklab {

enum class MaskerKind { Sfn, Ssharp, Sdiamond, Multiparty, Injection, Remark24, Custom };

inline std::string masker_kind_name(MaskerKind k) {
  switch (k) {
    case MaskerKind::Sfn: return "sfn";
    case MaskerKind::Ssharp: return "sharp";
    case MaskerKind::Sdiamond: return "diamond";
    case MaskerKind::Multiparty: return "multiparty";
    case MaskerKind::Injection: return "injection";
    case MaskerKind::Remark24: return "remark24";
    case MaskerKind::Custom: return "custom";
  }
  throw std::logic_error("masker_kind_name: unknown kind");
}

inline MaskerKind parse_masker_kind(const std::string& s) {
  if (s == "sfn") return MaskerKind::Sfn;
  if (s == "sharp") return MaskerKind::Ssharp;
  if (s == "diamond") return MaskerKind::Sdiamond;
  if (s == "multiparty") return MaskerKind::Multiparty;
  if (s == "injection") return MaskerKind::Injection;
  if (s == "remark24") return MaskerKind::Remark24;
  if (s == "custom") return MaskerKind::Custom;
  throw std::invalid_argument("unknown masker kind: " + s);
}

/// A linear map C^{d_a} -> C^{d_a * d_b} stored as a (d_a*d_b) x d_a matrix.
/// Always injective; the constructed kinds other than Injection are isometries.
struct Masker {
  std::size_t d_a = 0;
  std::size_t d_b = 0;
  ComplexMatrix matrix;
  MaskerKind kind = MaskerKind::Custom;
  std::optional<ComplexMatrix> basis_a;  // generating {|e_k>} when applicable
  std::optional<ComplexMatrix> basis_b;  // generating {|f_k>} when applicable

  ComplexVector apply(const ComplexVector& psi) const { return matrix * psi; }
  ComplexVector apply(const PureState& psi) const { return matrix * psi.amplitudes(); }
};

inline bool masker_kind_is_isometric(MaskerKind k) {
  return k == MaskerKind::Sfn || k == MaskerKind::Ssharp || k == MaskerKind::Sdiamond ||
         k == MaskerKind::Multiparty;
}

/// Shape, injectivity (min singular value) and, for the isometric kinds,
/// S†S = I. Throws on violation.
inline void validate_masker(const Masker& s, double tol = 1e-10) {
  if (s.d_a == 0 || s.d_b == 0)
    throw std::invalid_argument("Masker: dimensions must be positive");
  if (s.matrix.rows() != s.d_a * s.d_b || s.matrix.cols() != s.d_a)
    throw std::invalid_argument("Masker: matrix shape does not match dimensions");
  if (min_singular_value(s.matrix) <= 1e-10)
    throw std::invalid_argument("Masker: matrix is not injective");
  if (masker_kind_is_isometric(s.kind) && !is_isometry(s.matrix, tol))
    throw std::invalid_argument("Masker: kind requires an isometry");
}

inline bool is_isometry(const Masker& s, double tol = 1e-10) {
  return is_isometry(s.matrix, tol);
}

// -- QFT -----------------------------------------------------------------------

/// Quantum Fourier transform of order n: entry (k,j) = w^{k*j}/sqrt(n) with
/// w = exp(2*pi*i/n) and zero-based indices. Exponents are reduced mod n so the
/// matrix is unitary to machine precision.
inline ComplexMatrix qft_matrix(std::size_t n) {
  if (n < 1) throw std::invalid_argument("qft_matrix: order must be >= 1");
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t e = (k * j) % n;
      f(k, j) = std::polar(scale, 2.0 * std::numbers::pi * static_cast<double>(e) /
                                      static_cast<double>(n));
    }
  return f;
}

namespace detail {

inline void require_orthonormal(const ComplexMatrix& basis, double tol, const char* what) {
  if (!basis.square())
    throw std::invalid_argument(std::string(what) + ": basis must be square (full basis)");
  const ComplexMatrix gram = basis.adjoint() * basis;
  if (max_abs_diff(gram, ComplexMatrix::identity(basis.cols())) > tol)
    throw std::invalid_argument(std::string(what) + ": basis is not orthonormal");
}

}  // namespace detail

// -- masker constructors ---------------------------------------------------------

/// Fourier-type masker on an orthonormal basis {|psi_i>}: maps |psi_i> to
/// sum_j c_ij |psi_j>|psi_j>, c the QFT of order n. The basis must span the
/// whole space (n = d_A).
inline Masker build_s_fn(const ComplexMatrix& basis, std::size_t n, double tol = 1e-10) {
  if (basis.rows() != n || basis.cols() != n)
    throw std::invalid_argument("build_s_fn: basis must be n orthonormal vectors spanning dimension n");
  detail::require_orthonormal(basis, tol, "build_s_fn");
  const ComplexMatrix f = qft_matrix(n);
  ComplexMatrix m(n * n, n);
  for (std::size_t i = 0; i < n; ++i) {
    ComplexVector col(n * n, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexVector pj = column(basis, j);
      const ComplexVector pp = tensor(pj, pj);
      for (std::size_t t = 0; t < pp.size(); ++t) col[t] += f(i, j) * pp[t];
    }
    set_column(m, i, col);
  }
  // columns above are the images of |psi_i>; compose with the change of
  // coordinates so the operator acts on plain coordinate vectors
  Masker s{n, n, m * basis.adjoint(), MaskerKind::Sfn, basis, basis};
  validate_masker(s, tol);
  return s;
}

/// Pairing masker |e_k> -> |e_k>|f_k>.
inline Masker build_s_sharp(const ComplexMatrix& basis_a, const ComplexMatrix& basis_b,
                            double tol = 1e-10) {
  if (basis_a.rows() != basis_b.rows())
    throw std::invalid_argument("build_s_sharp: bases have different dimensions");
  detail::require_orthonormal(basis_a, tol, "build_s_sharp");
  detail::require_orthonormal(basis_b, tol, "build_s_sharp");
  const std::size_t d = basis_a.rows();
  ComplexMatrix m(d * d, d);
  for (std::size_t k = 0; k < d; ++k)
    set_column(m, k, tensor(column(basis_a, k), column(basis_b, k)));
  Masker s{d, d, m * basis_a.adjoint(), MaskerKind::Ssharp, basis_a, basis_b};
  validate_masker(s, tol);
  return s;
}

/// Fourier-phased pairing masker
/// |e_j> -> d^{-1/2} sum_k w^{(j-1)(k-1)} |e_k>|f_k>.
inline Masker build_s_diamond(const ComplexMatrix& basis_a, const ComplexMatrix& basis_b,
                              double tol = 1e-10) {
  if (basis_a.rows() != basis_b.rows())
    throw std::invalid_argument("build_s_diamond: bases have different dimensions");
  detail::require_orthonormal(basis_a, tol, "build_s_diamond");
  detail::require_orthonormal(basis_b, tol, "build_s_diamond");
  const std::size_t d = basis_a.rows();
  const ComplexMatrix f = qft_matrix(d);
  ComplexMatrix m(d * d, d);
  for (std::size_t j = 0; j < d; ++j) {
    ComplexVector col(d * d, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < d; ++k) {
      const ComplexVector ef = tensor(column(basis_a, k), column(basis_b, k));
      for (std::size_t t = 0; t < ef.size(); ++t) col[t] += f(k, j) * ef[t];
    }
    set_column(m, j, col);
  }
  Masker s{d, d, m * basis_a.adjoint(), MaskerKind::Sdiamond, basis_a, basis_b};
  validate_masker(s, tol);
  return s;
}

/// 2n-party masker: |k> maps to the n-fold tensor power of the Fourier-paired
/// state sum_j c_kj |j>|j>, an isometry from C^n into n^{2n} dimensions whose
/// image of every pure input has all 2n single-party marginals equal to I_n/n.
/// Capped at n <= 3 (n = 3 already lives in dimension 729).
inline ComplexMatrix build_multiparty_masker(std::size_t n) {
  if (n < 2 || n > 3)
    throw std::invalid_argument("build_multiparty_masker: supported range is 2 <= n <= 3");
  const ComplexMatrix f = qft_matrix(n);
  std::size_t dim = 1;
  for (std::size_t t = 0; t < 2 * n; ++t) dim *= n;
  ComplexMatrix m(dim, n);
  for (std::size_t k = 0; k < n; ++k) {
    ComplexVector paired(n * n, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) paired[j * n + j] = f(k, j);
    ComplexVector col = paired;
    for (std::size_t t = 1; t < n; ++t) col = tensor(col, paired);
    set_column(m, k, col);
  }
  return m;
}

/// The multiparty masker wrapped as a bipartite masker (first party vs rest).
inline Masker multiparty_masker(std::size_t n) {
  ComplexMatrix m = build_multiparty_masker(n);
  const std::size_t d_b = m.rows() / n;
  Masker s{n, d_b, std::move(m), MaskerKind::Multiparty, std::nullopt, std::nullopt};
  validate_masker(s);
  return s;
}

/// Injection masker for a linearly independent set: the input states are
/// Loewdin-orthogonalized with (T†T)^{-1/2} and fed through the Fourier-phased
/// pairing masker built on the resulting basis. Input sets smaller than the
/// dimension are completed with orthogonalized standard-basis vectors.
inline Masker build_injection_masker(const std::vector<PureState>& states,
                                     double dependence_tol = 1e-10) {
  if (states.empty()) throw std::invalid_argument("build_injection_masker: empty state set");
  const std::size_t d = states.front().dim();
  if (states.size() > d)
    throw std::invalid_argument("build_injection_masker: more states than dimension");
  std::vector<ComplexVector> cols;
  cols.reserve(d);
  for (const PureState& s : states) {
    if (s.dim() != d)
      throw std::invalid_argument("build_injection_masker: inconsistent dimensions");
    cols.push_back(s.amplitudes());
  }
  ComplexMatrix p = columns_matrix(cols);
  {
    const ComplexMatrix gram = hermitize(p.adjoint() * p);
    if (eigh(gram).eigenvalues.back() <= dependence_tol)
      throw std::invalid_argument("build_injection_masker: states are linearly dependent");
  }
  if (states.size() < d) {
    const ComplexMatrix span = orthonormalize_columns(p);
    const ComplexMatrix full = complete_orthonormal_basis(span);
    std::vector<ComplexVector> extended = cols;
    for (std::size_t j = states.size(); j < d; ++j) extended.push_back(column(full, j));
    p = columns_matrix(extended);
  }
  const ComplexMatrix tt = hermitize(p * p.adjoint());  // T†T = sum_k |psi_k><psi_k|
  const ComplexMatrix r = inv_sqrt_psd(tt);
  const ComplexMatrix e_basis = r * p;  // orthonormal columns e_k = (T†T)^{-1/2} psi_k
  const Masker diamond = build_s_diamond(e_basis, ComplexMatrix::identity(d));
  Masker s{d, d, diamond.matrix * r, MaskerKind::Injection, e_basis,
           ComplexMatrix::identity(d)};
  validate_masker(s);
  return s;
}

/// The explicit qubit-into-C^2xC^4 operator whose images all share the same
/// A-side marginal I/2 yet whose B-side marginals differ: it satisfies the
/// necessary fixed-marginal structure without being a masker for the four-state
/// family built on |0>, |1>.
inline Masker build_remark24_operator() {
  const std::size_t d_a = 2, d_b = 4;
  const ComplexVector a0 = basis_vector(2, 0), a1 = basis_vector(2, 1);
  // |f_j^1> = |j-1>|0>, |f_j^2> = |j-1>|1> in B = C^2 (x) C^2.
  auto f = [&](std::size_t j, std::size_t k) {
    return tensor(basis_vector(2, j), basis_vector(2, k));
  };
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ComplexVector col0(d_a * d_b, Complex{0.0, 0.0});
  ComplexVector col1(d_a * d_b, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < 2; ++j) {
    const ComplexVector t0 = tensor(j == 0 ? a0 : a1, f(j, 0));
    const ComplexVector t1 = tensor(j == 0 ? a0 : a1, f(j, 1));
    for (std::size_t t = 0; t < col0.size(); ++t) {
      col0[t] += inv_sqrt2 * t0[t];
      col1[t] += inv_sqrt2 * t1[t];
    }
  }
  ComplexMatrix m(d_a * d_b, d_a);
  set_column(m, 0, col0);
  set_column(m, 1, col1);
  Masker s{d_a, d_b, std::move(m), MaskerKind::Remark24, std::nullopt, std::nullopt};
  validate_masker(s);
  return s;
}

/// Haar-like random isometry C^{d_a} -> C^{d_a*d_b} by orthonormalizing a
/// complex Gaussian matrix.
inline Masker random_isometry(std::size_t d_a, std::size_t d_b, Rng& rng) {
  if (d_a == 0 || d_b == 0)
    throw std::invalid_argument("random_isometry: dimensions must be positive");
  ComplexMatrix g(d_a * d_b, d_a);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = gaussian_complex(rng);
  Masker s{d_a, d_b, orthonormalize_columns(g), MaskerKind::Custom, std::nullopt,
           std::nullopt};
  validate_masker(s);
  return s;
}

inline Masker random_isometry(std::size_t d_a, std::size_t d_b, std::uint64_t seed) {
  Rng rng(seed);
  return random_isometry(d_a, d_b, rng);
}

/// Unitary dilation of an isometric masker for a chosen ancilla basis state.
inline ComplexMatrix extend_to_unitary(const Masker& s, std::size_t ancilla_index,
                                       double tol = 1e-10) {
  return extend_to_unitary(s.matrix, s.d_a, s.d_b, ancilla_index, tol);
}

// -- distinguished state families -------------------------------------------------

/// The four-state family on an orthogonal pair that no linear operator masks:
/// {psi1, psi2, (psi1+psi2)/sqrt2, (psi1-i*psi2)/sqrt2}.
inline std::vector<PureState> counterexample_states(const PureState& psi1,
                                                    const PureState& psi2,
                                                    double tol = 1e-10) {
  if (psi1.dim() != psi2.dim())
    throw std::invalid_argument("counterexample_states: dimension mismatch");
  if (std::abs(inner_product(psi1.amplitudes(), psi2.amplitudes())) > tol)
    throw std::invalid_argument("counterexample_states: inputs are not orthogonal");
  const ComplexVector& a = psi1.amplitudes();
  const ComplexVector& b = psi2.amplitudes();
  ComplexVector plus(a.size()), minus_i(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    plus[t] = a[t] + b[t];
    minus_i[t] = a[t] - Complex{0.0, 1.0} * b[t];
  }
  return {psi1, psi2, PureState::normalized_from(plus), PureState::normalized_from(minus_i)};
}

/// Nonnegative real vector with unit Euclidean norm (fixed amplitude moduli).
class AmplitudeVector {
 public:
  explicit AmplitudeVector(std::vector<double> entries, double tol = 1e-12)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("AmplitudeVector: empty");
    double s = 0.0;
    for (double r : entries_) {
      if (!(r >= 0.0)) throw std::invalid_argument("AmplitudeVector: negative entry");
      s += r * r;
    }
    if (std::abs(s - 1.0) > tol)
      throw std::invalid_argument("AmplitudeVector: squared entries do not sum to 1");
  }

  std::size_t dim() const { return entries_.size(); }
  const std::vector<double>& entries() const { return entries_; }
  double operator[](std::size_t k) const { return entries_[k]; }

 private:
  std::vector<double> entries_;
};

/// Nonnegative entries summing to 1.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> entries, double tol = 1e-12)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("ProbabilityVector: empty");
    double s = 0.0;
    for (double p : entries_) {
      if (!(p >= 0.0)) throw std::invalid_argument("ProbabilityVector: negative entry");
      s += p;
    }
    if (std::abs(s - 1.0) > tol)
      throw std::invalid_argument("ProbabilityVector: entries do not sum to 1");
  }

  std::size_t dim() const { return entries_.size(); }
  const std::vector<double>& entries() const { return entries_; }
  double operator[](std::size_t k) const { return entries_[k]; }

 private:
  std::vector<double> entries_;
};

/// Random member of the fixed-amplitude family sum_k e^{i phi_k} r_k |e_k> with
/// phases uniform on (-pi, pi].
inline PureState sample_q_r(const AmplitudeVector& r, const ComplexMatrix& basis, Rng& rng) {
  detail::require_orthonormal(basis, 1e-10, "sample_q_r");
  if (basis.rows() != r.dim())
    throw std::invalid_argument("sample_q_r: basis dimension does not match r");
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  ComplexVector v(r.dim(), Complex{0.0, 0.0});
  for (std::size_t k = 0; k < r.dim(); ++k) {
    const Complex amp = std::polar(r[k], phase(rng));
    const ComplexVector ek = column(basis, k);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] += amp * ek[t];
  }
  return PureState::normalized_from(v);
}

inline PureState sample_q_r(const AmplitudeVector& r, const ComplexMatrix& basis,
                            std::uint64_t seed) {
  Rng rng(seed);
  return sample_q_r(r, basis, rng);
}

namespace detail {

/// Random Hermitian matrix with zero diagonal.
inline ComplexMatrix random_offdiagonal_hermitian(std::size_t d, Rng& rng) {
  ComplexMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const Complex z = gaussian_complex(rng);
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

/// diag(p) plus a zero-diagonal Hermitian perturbation scaled to keep the
/// matrix positive semidefinite: t = min(1, 0.9*min(p)/||H||_F).
inline ComplexMatrix perturbed_diagonal(const std::vector<double>& p, Rng& rng) {
  const std::size_t d = p.size();
  ComplexMatrix base = ComplexMatrix::diagonal(p);
  ComplexMatrix h = random_offdiagonal_hermitian(d, rng);
  const double hn = h.frobenius_norm();
  const double pmin = *std::min_element(p.begin(), p.end());
  const double t = (hn > 0.0 && pmin > 0.0) ? std::min(1.0, 0.9 * pmin / hn) : 0.0;
  return base + h * t;
}

}  // namespace detail

/// Random density matrix whose diagonal in the given basis equals p.
inline DensityMatrix sample_q_p(const ProbabilityVector& p, const ComplexMatrix& basis,
                                Rng& rng) {
  detail::require_orthonormal(basis, 1e-10, "sample_q_p");
  if (basis.rows() != p.dim())
    throw std::invalid_argument("sample_q_p: basis dimension does not match p");
  const ComplexMatrix a = detail::perturbed_diagonal(p.entries(), rng);
  return DensityMatrix(p.dim(), hermitize(basis * a * basis.adjoint()));
}

inline DensityMatrix sample_q_p(const ProbabilityVector& p, const ComplexMatrix& basis,
                                std::uint64_t seed) {
  Rng rng(seed);
  return sample_q_p(p, basis, rng);
}

/// Random density matrix whose diagonal after QFT conjugation equals q:
/// rho = F†(diag(q) + perturbation)F.
inline DensityMatrix sample_q_q(const ProbabilityVector& q, Rng& rng) {
  const std::size_t d = q.dim();
  const ComplexMatrix f = qft_matrix(d);
  const ComplexMatrix a = detail::perturbed_diagonal(q.entries(), rng);
  return DensityMatrix(d, hermitize(f.adjoint() * a * f));
}

inline DensityMatrix sample_q_q(const ProbabilityVector& q, std::uint64_t seed) {
  Rng rng(seed);
  return sample_q_q(q, rng);
}

}  // namespace masklab
