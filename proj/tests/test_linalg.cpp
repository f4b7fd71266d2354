#include <gtest/gtest.h>

#include "masklab/linalg.hpp"
#include "masklab/states.hpp"

using namespace masklab;

namespace {

// Independent Kronecker oracle: plain quadruple loop over all index pairs.
ComplexMatrix tensor_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Independent partial-trace oracle: sandwich with basis bras/kets built from
// tensor products, never touching the fused-index arithmetic.
ComplexMatrix trace_out_b_oracle(const ComplexMatrix& m, std::size_t d_a, std::size_t d_b) {
  ComplexMatrix out(d_a, d_a);
  const ComplexMatrix id_a = ComplexMatrix::identity(d_a);
  for (std::size_t k = 0; k < d_b; ++k) {
    ComplexMatrix ket(d_b, 1);
    ket(k, 0) = 1.0;
    const ComplexMatrix wide = tensor(id_a, ket.adjoint());  // d_a x (d_a*d_b)
    out += wide * m * wide.adjoint();
  }
  return out;
}

ComplexMatrix trace_out_a_oracle(const ComplexMatrix& m, std::size_t d_a, std::size_t d_b) {
  ComplexMatrix out(d_b, d_b);
  const ComplexMatrix id_b = ComplexMatrix::identity(d_b);
  for (std::size_t i = 0; i < d_a; ++i) {
    ComplexMatrix ket(d_a, 1);
    ket(i, 0) = 1.0;
    const ComplexMatrix wide = tensor(ket.adjoint(), id_b);  // d_b x (d_a*d_b)
    out += wide * m * wide.adjoint();
  }
  return out;
}

ComplexMatrix random_hermitian(std::size_t d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = gaussian_complex(rng);
  return hermitize(g);
}

}  // namespace

TEST(TensorTest, IdentityTimesIdentity) {
  const ComplexMatrix t = tensor(ComplexMatrix::identity(2), ComplexMatrix::identity(2));
  EXPECT_LE(max_abs_diff(t, ComplexMatrix::identity(4)), 0.0);
}

TEST(TensorTest, DiagonalOrderFollowsSlowAConvention) {
  const ComplexMatrix a = ComplexMatrix::diagonal({1.0, 0.0});
  const ComplexMatrix b = ComplexMatrix::diagonal({0.0, 1.0});
  const ComplexMatrix expect = ComplexMatrix::diagonal({0.0, 1.0, 0.0, 0.0});
  EXPECT_LE(max_abs_diff(tensor(a, b), expect), 0.0);
}

TEST(TensorTest, MatchesQuadrupleLoopOracle) {
  const ComplexMatrix proj0{{1.0, 0.0}, {0.0, 0.0}};
  const ComplexMatrix pauli_x{{0.0, 1.0}, {1.0, 0.0}};
  EXPECT_LE(max_abs_diff(tensor(proj0, pauli_x), tensor_oracle(proj0, pauli_x)), 0.0);

  Rng rng(42);
  ComplexMatrix a(3, 2), b(2, 4);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = gaussian_complex(rng);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) = gaussian_complex(rng);
  EXPECT_LE(max_abs_diff(tensor(a, b), tensor_oracle(a, b)), 1e-14);
}

TEST(PartialTraceTest, ProductStateFactorizes) {
  Rng rng(7);
  const DensityMatrix rho = random_density(2, 2, rng);
  const DensityMatrix sigma = random_density(3, 3, rng);
  const ComplexMatrix joint = tensor(rho.matrix(), sigma.matrix());
  EXPECT_LE(frobenius_distance(partial_trace(joint, 2, 3, TraceSide::TraceOutB),
                               rho.matrix()),
            1e-12);
  EXPECT_LE(frobenius_distance(partial_trace(joint, 2, 3, TraceSide::TraceOutA),
                               sigma.matrix()),
            1e-12);
}

TEST(PartialTraceTest, BellStateMarginalsAreMaximallyMixed) {
  ComplexVector bell(4, Complex{0.0, 0.0});
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  const ComplexMatrix density = outer_product(bell, bell);
  const ComplexMatrix half_id = ComplexMatrix::identity(2) * 0.5;
  EXPECT_LE(frobenius_distance(partial_trace(density, 2, 2, TraceSide::TraceOutB), half_id),
            1e-15);
  EXPECT_LE(frobenius_distance(partial_trace(density, 2, 2, TraceSide::TraceOutA), half_id),
            1e-15);
}

TEST(PartialTraceTest, MatchesIndexOracleOnRandomDensity) {
  Rng rng(11);
  const DensityMatrix rho = random_density(6, 6, rng);
  EXPECT_LE(frobenius_distance(partial_trace(rho.matrix(), 2, 3, TraceSide::TraceOutB),
                               trace_out_b_oracle(rho.matrix(), 2, 3)),
            1e-12);
  EXPECT_LE(frobenius_distance(partial_trace(rho.matrix(), 2, 3, TraceSide::TraceOutA),
                               trace_out_a_oracle(rho.matrix(), 2, 3)),
            1e-12);
}

TEST(PartialTraceTest, LinearityAndTracePreservation) {
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix m = random_hermitian(6, rng);
    const ComplexMatrix n = random_hermitian(6, rng);
    const Complex alpha = gaussian_complex(rng);
    const Complex beta = gaussian_complex(rng);
    const ComplexMatrix combo = m * alpha + n * beta;
    for (TraceSide side : {TraceSide::TraceOutB, TraceSide::TraceOutA}) {
      const ComplexMatrix lhs = partial_trace(combo, 2, 3, side);
      const ComplexMatrix rhs =
          partial_trace(m, 2, 3, side) * alpha + partial_trace(n, 2, 3, side) * beta;
      EXPECT_LE(frobenius_distance(lhs, rhs), 1e-12);
    }
    EXPECT_LE(std::abs(partial_trace(m, 2, 3, TraceSide::TraceOutB).trace() - m.trace()),
              1e-12);
  }
}

TEST(PartialTraceTest, RejectsShapeMismatch) {
  EXPECT_THROW(partial_trace(ComplexMatrix::identity(5), 2, 3, TraceSide::TraceOutB),
               std::invalid_argument);
}

TEST(SinglePartyMarginalTest, AgreesWithTwoStepBipartiteRoute) {
  Rng rng(17);
  const std::vector<std::size_t> dims = {2, 3, 2};
  const PureState psi = random_pure(12, rng);
  const ComplexMatrix density = psi.projector();
  // middle party: trace out the trailing factor, then the leading one
  const ComplexMatrix step1 = partial_trace(density, 6, 2, TraceSide::TraceOutB);
  const ComplexMatrix middle = partial_trace(step1, 2, 3, TraceSide::TraceOutA);
  EXPECT_LE(frobenius_distance(single_party_marginal(psi.amplitudes(), dims, 1), middle),
            1e-12);
}

TEST(EighTest, DiagonalCase) {
  const EighResult r = eigh(ComplexMatrix::diagonal({0.7, 0.3}));
  ASSERT_EQ(r.eigenvalues.size(), 2u);
  EXPECT_NEAR(r.eigenvalues[0], 0.7, 1e-14);
  EXPECT_NEAR(r.eigenvalues[1], 0.3, 1e-14);
  EXPECT_LE(max_abs_diff(r.eigenvectors, ComplexMatrix::identity(2)), 1e-12);
}

TEST(EighTest, IdentityHasFlatSpectrum) {
  const EighResult r = eigh(ComplexMatrix::identity(5));
  for (double lambda : r.eigenvalues) EXPECT_NEAR(lambda, 1.0, 1e-14);
}

TEST(EighTest, ReconstructsRandomHermitian) {
  Rng rng(19);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix m = random_hermitian(4, rng);
    const EighResult r = eigh(m);
    ComplexMatrix rebuilt(4, 4);
    for (std::size_t k = 0; k < 4; ++k) {
      const ComplexVector v = column(r.eigenvectors, k);
      rebuilt += outer_product(v, v) * r.eigenvalues[k];
    }
    EXPECT_LE(frobenius_distance(rebuilt, m), 1e-9);
    EXPECT_TRUE(std::is_sorted(r.eigenvalues.rbegin(), r.eigenvalues.rend()));
    EXPECT_LE(max_abs_diff(r.eigenvectors.adjoint() * r.eigenvectors,
                           ComplexMatrix::identity(4)),
              1e-10);
  }
}

TEST(EighTest, RejectsNonHermitian) {
  const ComplexMatrix m{{0.0, 1.0}, {0.0, 0.0}};
  EXPECT_THROW(eigh(m), std::invalid_argument);
}

TEST(InvSqrtPsdTest, IdentityIsFixed) {
  EXPECT_LE(max_abs_diff(inv_sqrt_psd(ComplexMatrix::identity(3)),
                         ComplexMatrix::identity(3)),
            1e-12);
}

TEST(InvSqrtPsdTest, DiagonalCase) {
  const ComplexMatrix r = inv_sqrt_psd(ComplexMatrix::diagonal({4.0, 1.0}));
  EXPECT_LE(max_abs_diff(r, ComplexMatrix::diagonal({0.5, 1.0})), 1e-12);
}

TEST(InvSqrtPsdTest, WhitensARandomGramMatrix) {
  Rng rng(23);
  ComplexMatrix v(5, 3);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) v(i, j) = gaussian_complex(rng);
  const ComplexMatrix gram = hermitize(v.adjoint() * v);
  const ComplexMatrix r = inv_sqrt_psd(gram);
  EXPECT_LE(frobenius_distance(r * gram * r, ComplexMatrix::identity(3)), 1e-8);
}

TEST(InvSqrtPsdTest, RejectsSingularInput) {
  EXPECT_THROW(inv_sqrt_psd(ComplexMatrix::diagonal({1.0, 0.0})), std::invalid_argument);
  EXPECT_THROW(inv_sqrt_psd(ComplexMatrix::diagonal({1.0, -0.5})), std::invalid_argument);
}

TEST(OrthonormalizeTest, ProducesOrthonormalColumnsAndRejectsDependence) {
  Rng rng(29);
  ComplexMatrix g(4, 3);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = gaussian_complex(rng);
  const ComplexMatrix q = orthonormalize_columns(g);
  EXPECT_LE(max_abs_diff(q.adjoint() * q, ComplexMatrix::identity(3)), 1e-12);

  ComplexMatrix dep(3, 2);
  dep(0, 0) = 1.0;
  dep(0, 1) = 2.0;  // same direction
  EXPECT_THROW(orthonormalize_columns(dep), std::invalid_argument);
}

TEST(ExtendToUnitaryTest, IdentityEmbeddingGivesIdentity) {
  const ComplexMatrix u = extend_to_unitary(ComplexMatrix::identity(3), 3, 1, 0);
  EXPECT_LE(max_abs_diff(u, ComplexMatrix::identity(3)), 1e-12);
}

TEST(ExtendToUnitaryTest, DilatesAPairingIsometry) {
  // |e_k> -> |e_k>|f_k> on the standard bases, d = 2.
  ComplexMatrix s(4, 2);
  s(0, 0) = 1.0;  // |00>
  s(3, 1) = 1.0;  // |11>
  const ComplexMatrix u = extend_to_unitary(s, 2, 2, 0);
  EXPECT_LE(max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(4)), 1e-10);
}

TEST(ExtendToUnitaryTest, ColumnActionMatchesOnRandomStates) {
  Rng rng(31);
  ComplexMatrix g(9, 3);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = gaussian_complex(rng);
  const ComplexMatrix s = orthonormalize_columns(g);
  const std::size_t ancilla = 1;
  const ComplexMatrix u = extend_to_unitary(s, 3, 3, ancilla);
  EXPECT_LE(max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(9)), 1e-10);
  for (int t = 0; t < 100; ++t) {
    const PureState psi = random_pure(3, rng);
    const ComplexVector embedded =
        tensor(psi.amplitudes(), basis_vector(3, ancilla));
    EXPECT_LE(vec_norm(vec_sub(u * embedded, s * psi.amplitudes())), 1e-10);
  }
}

TEST(ExtendToUnitaryTest, RejectsNonIsometry) {
  ComplexMatrix s(4, 2);
  s(0, 0) = 1.0;
  s(1, 1) = 0.5;
  EXPECT_THROW(extend_to_unitary(s, 2, 2, 0), std::invalid_argument);
  ComplexMatrix ok(4, 2);
  ok(0, 0) = 1.0;
  ok(3, 1) = 1.0;
  EXPECT_THROW(extend_to_unitary(ok, 2, 2, 5), std::invalid_argument);
}

TEST(SchmidtRawTest, ReconstructsManyRandomStates) {
  Rng rng(37);
  const std::vector<std::pair<std::size_t, std::size_t>> dims = {
      {2, 2}, {2, 3}, {3, 3}, {4, 4}};
  for (const auto& [d_a, d_b] : dims) {
    for (int t = 0; t < 250; ++t) {
      const PureState psi = random_pure(d_a * d_b, rng);
      const ComplexVector fixed = fix_global_phase(psi.amplitudes());
      const RawSchmidt dec = schmidt_raw(psi.amplitudes(), d_a, d_b);
      ComplexVector rebuilt(d_a * d_b, Complex{0.0, 0.0});
      for (std::size_t j = 0; j < dec.coefficients.size(); ++j) {
        const ComplexVector term = tensor(column(dec.left, j), column(dec.right, j));
        for (std::size_t i = 0; i < term.size(); ++i)
          rebuilt[i] += dec.coefficients[j] * term[i];
      }
      ASSERT_LE(vec_norm(vec_sub(rebuilt, fixed)), 1e-10);
    }
  }
}

TEST(SchmidtRawTest, CoefficientsSquareToMarginalEigenvalues) {
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    const PureState psi = random_pure(12, rng);
    const RawSchmidt dec = schmidt_raw(psi.amplitudes(), 3, 4);
    const ComplexMatrix marginal =
        partial_trace(psi.projector(), 3, 4, TraceSide::TraceOutB);
    const EighResult eig = eigh(hermitize(marginal));
    for (std::size_t j = 0; j < dec.coefficients.size(); ++j)
      ASSERT_NEAR(dec.coefficients[j] * dec.coefficients[j], eig.eigenvalues[j], 1e-9);
  }
}

TEST(SchmidtRawTest, PhaseConventionMakesLargestLeftComponentRealPositive) {
  Rng rng(43);
  const PureState psi = random_pure(9, rng);
  const RawSchmidt dec = schmidt_raw(psi.amplitudes(), 3, 3);
  for (std::size_t j = 0; j < dec.coefficients.size(); ++j) {
    const ComplexVector e = column(dec.left, j);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < e.size(); ++i)
      if (std::abs(e[i]) > std::abs(e[imax])) imax = i;
    EXPECT_GT(e[imax].real(), 0.0);
    EXPECT_LE(std::abs(e[imax].imag()), 1e-12 * std::abs(e[imax]));
  }
}

TEST(SchmidtRawTest, RejectsLengthMismatch) {
  EXPECT_THROW(schmidt_raw(ComplexVector(5, Complex{1.0, 0.0}), 2, 3),
               std::invalid_argument);
}
