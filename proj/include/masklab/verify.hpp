#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "masklab/linalg.hpp"
#include "masklab/masker.hpp"
#include "masklab/matrix.hpp"
#include "masklab/states.hpp"

namespace masklab {

enum class Verdict { Masked, NotMasked };

inline std::string verdict_name(Verdict v) {
  return v == Verdict::Masked ? "Masked" : "NotMasked";
}

struct StateDeviation {
  std::size_t index = 0;
  double dev_a = 0.0;  // Frobenius distance of the A marginal to the reference
  double dev_b = 0.0;
};

/// Outcome of a masking check over a set of states. The reference marginals
/// are those of the first state's image; deviations are measured against them.
struct MaskingReport {
  DensityMatrix reference_marginal_a;
  DensityMatrix reference_marginal_b;
  std::vector<StateDeviation> per_state_deviations;
  double max_deviation = 0.0;
  Verdict verdict = Verdict::NotMasked;
  double tolerance = 0.0;
};

namespace detail {

struct MarginalPair {
  ComplexMatrix a;
  ComplexMatrix b;
};

inline MarginalPair image_marginals_pure(const Masker& s, const PureState& psi) {
  if (psi.dim() != s.d_a)
    throw std::invalid_argument("verify: state dimension does not match masker");
  ComplexVector img = s.apply(psi);
  if (s.kind == MaskerKind::Injection) img = normalized(img);
  const ComplexMatrix density = outer_product(img, img);
  return {partial_trace(density, s.d_a, s.d_b, TraceSide::TraceOutB),
          partial_trace(density, s.d_a, s.d_b, TraceSide::TraceOutA)};
}

inline MarginalPair image_marginals_mixed(const Masker& s, const DensityMatrix& rho) {
  if (rho.dim() != s.d_a)
    throw std::invalid_argument("verify: state dimension does not match masker");
  ComplexMatrix img = s.matrix * rho.matrix() * s.matrix.adjoint();
  if (s.kind == MaskerKind::Injection) {
    const double tr = img.trace().real();
    if (tr <= 0.0) throw std::runtime_error("verify: image has nonpositive trace");
    img *= Complex(1.0 / tr, 0.0);
  }
  return {partial_trace(img, s.d_a, s.d_b, TraceSide::TraceOutB),
          partial_trace(img, s.d_a, s.d_b, TraceSide::TraceOutA)};
}

inline MaskingReport report_from_marginals(const std::vector<MarginalPair>& marginals,
                                           double tol) {
  MaskingReport report{
      DensityMatrix(hermitize(marginals.front().a)),
      DensityMatrix(hermitize(marginals.front().b)),
      {},
      0.0,
      Verdict::NotMasked,
      tol};
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    const double da = frobenius_distance(marginals[k].a, marginals.front().a);
    const double db = frobenius_distance(marginals[k].b, marginals.front().b);
    report.per_state_deviations.push_back({k, da, db});
    report.max_deviation = std::max({report.max_deviation, da, db});
  }
  report.verdict = report.max_deviation <= tol ? Verdict::Masked : Verdict::NotMasked;
  return report;
}

}  // namespace detail

/// Decides whether the masker sends every state of the set to a bipartite
/// image with the same pair of marginals. Images of a non-isometric injection
/// are renormalized first, since masking is a statement about states.
inline MaskingReport verify_masking_pure(const Masker& s, const std::vector<PureState>& states,
                                         double tol = 1e-9) {
  if (states.empty()) throw std::invalid_argument("verify_masking_pure: empty state set");
  std::vector<detail::MarginalPair> marginals;
  marginals.reserve(states.size());
  for (const PureState& psi : states) marginals.push_back(detail::image_marginals_pure(s, psi));
  return detail::report_from_marginals(marginals, tol);
}

/// Mixed-state variant: rho maps to S rho S† (trace-renormalized for the
/// injection kind) before the marginals are compared.
inline MaskingReport verify_masking_mixed(const Masker& s,
                                          const std::vector<DensityMatrix>& states,
                                          double tol = 1e-9) {
  if (states.empty()) throw std::invalid_argument("verify_masking_mixed: empty state set");
  std::vector<detail::MarginalPair> marginals;
  marginals.reserve(states.size());
  for (const DensityMatrix& rho : states)
    marginals.push_back(detail::image_marginals_mixed(s, rho));
  return detail::report_from_marginals(marginals, tol);
}

/// Structural certificate: every image must decompose over one common A-side
/// frame with one common coefficient list, and symmetrically over one common
/// B-side frame. Holding is equivalent to the masking verdict.
struct Theorem21Certificate {
  std::vector<double> schmidt_coefficients;  // representative (first state)
  ComplexMatrix left_frame;                  // representative {|e_i>}
  ComplexMatrix right_frame;                 // representative {|f_j>}
  double coefficient_match_residual = 0.0;
  double frame_match_residual = 0.0;
  bool holds = false;
  double tolerance = 0.0;
};

namespace detail {

/// Splits descending coefficients into clusters of (near-)equal values.
/// Frames are compared per cluster through their projectors, which is the
/// comparison that stays meaningful under degeneracy.
inline std::vector<std::pair<std::size_t, std::size_t>> coefficient_clusters(
    const std::vector<double>& coeffs, double gap = 1e-6) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t lo = 0;
  for (std::size_t i = 1; i <= coeffs.size(); ++i) {
    if (i == coeffs.size() || coeffs[i - 1] - coeffs[i] > gap) {
      out.push_back({lo, i});
      lo = i;
    }
  }
  return out;
}

inline ComplexMatrix cluster_projector(const ComplexMatrix& vectors, std::size_t lo,
                                       std::size_t hi) {
  ComplexMatrix p(vectors.rows(), vectors.rows());
  for (std::size_t j = lo; j < hi && j < vectors.cols(); ++j) {
    const ComplexVector v = column(vectors, j);
    p += outer_product(v, v);
  }
  return p;
}

}  // namespace detail

inline Theorem21Certificate theorem21_certificate(const Masker& s,
                                                  const std::vector<PureState>& states,
                                                  double tol = 1e-9) {
  if (states.empty()) throw std::invalid_argument("theorem21_certificate: empty state set");
  std::vector<RawSchmidt> decs;
  decs.reserve(states.size());
  for (const PureState& psi : states) {
    if (psi.dim() != s.d_a)
      throw std::invalid_argument("theorem21_certificate: state dimension does not match masker");
    ComplexVector img = s.apply(psi);
    if (s.kind == MaskerKind::Injection) img = normalized(img);
    decs.push_back(schmidt_raw(img, s.d_a, s.d_b));
  }

  const RawSchmidt& ref = decs.front();
  Theorem21Certificate cert;
  cert.schmidt_coefficients = ref.coefficients;
  cert.left_frame = ref.left;
  cert.right_frame = ref.right;
  cert.tolerance = tol;

  for (const RawSchmidt& d : decs) {
    const std::size_t n = std::max(ref.coefficients.size(), d.coefficients.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double a = i < ref.coefficients.size() ? ref.coefficients[i] : 0.0;
      const double b = i < d.coefficients.size() ? d.coefficients[i] : 0.0;
      cert.coefficient_match_residual = std::max(cert.coefficient_match_residual,
                                                 std::abs(a - b));
    }
  }

  const auto clusters = detail::coefficient_clusters(ref.coefficients);
  for (const RawSchmidt& d : decs)
    for (const auto& [lo, hi] : clusters) {
      const ComplexMatrix pa_ref = detail::cluster_projector(ref.left, lo, hi);
      const ComplexMatrix pa = detail::cluster_projector(d.left, lo, hi);
      const ComplexMatrix pb_ref = detail::cluster_projector(ref.right, lo, hi);
      const ComplexMatrix pb = detail::cluster_projector(d.right, lo, hi);
      cert.frame_match_residual =
          std::max({cert.frame_match_residual, frobenius_distance(pa_ref, pa),
                    frobenius_distance(pb_ref, pb)});
    }

  cert.holds = cert.coefficient_match_residual <= tol && cert.frame_match_residual <= tol;
  return cert;
}

/// tr_A[S|psi1><psi2|S†] — the off-diagonal marginal whose vanishing is forced
/// whenever superpositions of psi1, psi2 stay masked.
inline ComplexMatrix cross_term(const Masker& s, const PureState& psi1,
                                const PureState& psi2) {
  if (psi1.dim() != s.d_a || psi2.dim() != s.d_a)
    throw std::invalid_argument("cross_term: state dimension does not match masker");
  const ComplexVector u = s.apply(psi1);
  const ComplexVector w = s.apply(psi2);
  return partial_trace(outer_product(u, w), s.d_a, s.d_b, TraceSide::TraceOutA);
}

// -- maximal maskable set membership ------------------------------------------

/// Fixed-amplitude family: | |<e_k|psi>| - r_k | <= tol for every k.
inline bool membership_q_r(const PureState& psi, const AmplitudeVector& r,
                           const ComplexMatrix& basis, double tol = 1e-10) {
  if (psi.dim() != r.dim() || basis.rows() != r.dim())
    throw std::invalid_argument("membership_q_r: dimension mismatch");
  for (std::size_t k = 0; k < r.dim(); ++k) {
    const Complex overlap = inner_product(column(basis, k), psi.amplitudes());
    if (std::abs(std::abs(overlap) - r[k]) > tol) return false;
  }
  return true;
}

/// Fixed-diagonal family: <e_k|rho|e_k> = p_k within tol.
inline bool membership_q_p(const DensityMatrix& rho, const ProbabilityVector& p,
                           const ComplexMatrix& basis, double tol = 1e-10) {
  if (rho.dim() != p.dim() || basis.rows() != p.dim())
    throw std::invalid_argument("membership_q_p: dimension mismatch");
  for (std::size_t k = 0; k < p.dim(); ++k) {
    const ComplexVector ek = column(basis, k);
    const Complex diag = inner_product(ek, rho.matrix() * ek);
    if (std::abs(diag.real() - p[k]) > tol || std::abs(diag.imag()) > tol) return false;
  }
  return true;
}

/// F_d M_rho F_d† — the state matrix conjugated by the QFT.
inline ComplexMatrix qft_conjugate(const DensityMatrix& rho) {
  const ComplexMatrix f = qft_matrix(rho.dim());
  return f * rho.matrix() * f.adjoint();
}

/// Fixed QFT-frame diagonal family: (F M_rho F†)_kk = q_k within tol.
inline bool membership_q_q(const DensityMatrix& rho, const ProbabilityVector& q,
                           double tol = 1e-10) {
  if (rho.dim() != q.dim())
    throw std::invalid_argument("membership_q_q: dimension mismatch");
  const ComplexMatrix conj = qft_conjugate(rho);
  for (std::size_t k = 0; k < q.dim(); ++k) {
    if (std::abs(conj(k, k).real() - q[k]) > tol || std::abs(conj(k, k).imag()) > tol)
      return false;
  }
  return true;
}

/// True when psi's image marginals both match those of psi0's image: membership
/// in the largest set maskable together with psi0 under s.
inline bool omega_membership(const Masker& s, const PureState& psi0, const PureState& psi,
                             double tol = 1e-9) {
  const auto ref = detail::image_marginals_pure(s, psi0);
  const auto cur = detail::image_marginals_pure(s, psi);
  return frobenius_distance(ref.a, cur.a) <= tol && frobenius_distance(ref.b, cur.b) <= tol;
}

// -- channel probes -------------------------------------------------------------

enum class MarginalSide { A, B };

/// Largest deviation of the side-channel from the trace-type form
/// Phi(T) = tr(T) * rho0, probed on all d_a^2 matrix units (they span the
/// whole operator space, so the probe is exhaustive).
inline double trace_type_deviation(const Masker& s, MarginalSide side, double tol = 1e-10) {
  if (!is_isometry(s.matrix, tol))
    throw std::invalid_argument("trace_type_deviation: masker is not an isometry");
  const TraceSide keep =
      side == MarginalSide::A ? TraceSide::TraceOutB : TraceSide::TraceOutA;
  auto phi = [&](std::size_t i, std::size_t j) {
    const ComplexVector ci = column(s.matrix, i);
    const ComplexVector cj = column(s.matrix, j);
    return partial_trace(outer_product(ci, cj), s.d_a, s.d_b, keep);
  };
  const ComplexMatrix rho0 = phi(0, 0);
  double dev = 0.0;
  for (std::size_t i = 0; i < s.d_a; ++i)
    for (std::size_t j = 0; j < s.d_a; ++j) {
      const ComplexMatrix img = phi(i, j);
      const double d = (i == j) ? frobenius_distance(img, rho0) : img.frobenius_norm();
      dev = std::max(dev, d);
    }
  return dev;
}

inline bool is_trace_type_channel(const Masker& s, MarginalSide side, double tol = 1e-9) {
  return trace_type_deviation(s, side, 1e-10) <= tol;
}

// -- purification alignment -------------------------------------------------------

/// Two purifications of one reduced state, rewritten over a single left frame
/// with shared coefficients: psi_i = sum_j coeff_j |e_j> |f_j^{(i)}>.
struct AlignedPurifications {
  std::vector<double> coefficients;  // shared, descending
  ComplexMatrix left_frame;          // d_a x rank
  ComplexMatrix right_frame_1;       // d_b x rank
  ComplexMatrix right_frame_2;       // d_b x rank
};

inline AlignedPurifications align_purifications(const PureState& psi1, const PureState& psi2,
                                                std::size_t d_a, std::size_t d_b,
                                                double tol = 1e-9) {
  if (psi1.dim() != d_a * d_b || psi2.dim() != d_a * d_b)
    throw std::invalid_argument("align_purifications: state dimension does not match d_a*d_b");
  const ComplexMatrix ra1 =
      partial_trace(psi1.projector(), d_a, d_b, TraceSide::TraceOutB);
  const ComplexMatrix ra2 =
      partial_trace(psi2.projector(), d_a, d_b, TraceSide::TraceOutB);
  if (frobenius_distance(ra1, ra2) > tol)
    throw std::invalid_argument("align_purifications: inputs are not co-purifications");

  // Left frame and coefficients from the second state, as in the alignment
  // construction; both right frames then come from partial projections of the
  // raw inputs, so each input reconstructs exactly.
  const RawSchmidt dec = schmidt_raw(psi2.amplitudes(), d_a, d_b);
  const std::size_t rank = dec.coefficients.size();
  AlignedPurifications out;
  out.coefficients = dec.coefficients;
  out.left_frame = dec.left;
  out.right_frame_1 = ComplexMatrix(d_b, rank);
  out.right_frame_2 = ComplexMatrix(d_b, rank);
  for (std::size_t j = 0; j < rank; ++j) {
    const ComplexVector ej = column(dec.left, j);
    ComplexVector f1(d_b, Complex{0.0, 0.0});
    ComplexVector f2(d_b, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < d_a; ++i)
      for (std::size_t b = 0; b < d_b; ++b) {
        f1[b] += std::conj(ej[i]) * psi1.amplitude(i * d_b + b);
        f2[b] += std::conj(ej[i]) * psi2.amplitude(i * d_b + b);
      }
    const double c = out.coefficients[j];
    set_column(out.right_frame_1, j, scaled(f1, Complex(1.0 / c, 0.0)));
    set_column(out.right_frame_2, j, scaled(f2, Complex(1.0 / c, 0.0)));
  }
  return out;
}

/// Reconstruction sum_j coeff_j |e_j>|f_j> from an alignment.
inline ComplexVector aligned_reconstruction(const AlignedPurifications& ap, int which) {
  const ComplexMatrix& right = which == 1 ? ap.right_frame_1 : ap.right_frame_2;
  const std::size_t d_a = ap.left_frame.rows();
  const std::size_t d_b = right.rows();
  ComplexVector out(d_a * d_b, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < ap.coefficients.size(); ++j) {
    const ComplexVector term = tensor(column(ap.left_frame, j), column(right, j));
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += ap.coefficients[j] * term[t];
  }
  return out;
}

}  // namespace masklab
