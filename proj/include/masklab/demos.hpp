#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "masklab/linalg.hpp"
#include "masklab/masker.hpp"
#include "masklab/matrix.hpp"
#include "masklab/states.hpp"
#include "masklab/verify.hpp"

namespace masklab {

struct DemoCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct DemoResult {
  std::string name;
  std::vector<DemoCheck> checks;

  bool passed() const {
    for (const DemoCheck& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

namespace demo_detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << x;
  return os.str();
}

inline void check(std::vector<DemoCheck>& out, const std::string& name, bool pass,
                  const std::string& detail) {
  out.push_back({name, pass, detail});
}

inline ComplexMatrix scaled_identity(std::size_t d) {
  return ComplexMatrix::identity(d) * (1.0 / static_cast<double>(d));
}

inline std::vector<PureState> basis_states(const ComplexMatrix& basis) {
  std::vector<PureState> out;
  for (std::size_t j = 0; j < basis.cols(); ++j)
    out.push_back(PureState::normalized_from(column(basis, j)));
  return out;
}

inline ProbabilityVector random_probability_vector(std::size_t d, Rng& rng,
                                                   double min_entry = 0.0) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(d);
  for (;;) {
    double s = 0.0;
    for (double& x : p) {
      x = u(rng);
      s += x;
    }
    bool ok = true;
    for (double& x : p) {
      x /= s;
      if (x < min_entry) ok = false;
    }
    if (ok) return ProbabilityVector(p);
  }
}

inline AmplitudeVector random_amplitude_vector(std::size_t d, Rng& rng,
                                               double min_square_gap = 0.0) {
  std::uniform_real_distribution<double> u(0.25, 1.0);
  std::vector<double> r(d);
  for (int tries = 0; tries < 200; ++tries) {
    double s = 0.0;
    for (double& x : r) {
      x = u(rng);
      s += x * x;
    }
    for (double& x : r) x /= std::sqrt(s);
    bool ok = true;
    for (std::size_t i = 0; i < d && ok; ++i)
      for (std::size_t j = i + 1; j < d; ++j)
        if (std::abs(r[i] * r[i] - r[j] * r[j]) < min_square_gap) {
          ok = false;
          break;
        }
    if (ok) return AmplitudeVector(r);
  }
  throw std::runtime_error("random_amplitude_vector: could not satisfy separation");
}

/// Largest coordinate gap between the squared amplitude profiles of two
/// families; positive separation keeps failing cases far from the tolerance.
inline double amplitude_profile_gap(const AmplitudeVector& a, const AmplitudeVector& b) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k)
    gap = std::max(gap, std::abs(a[k] * a[k] - b[k] * b[k]));
  return gap;
}

inline std::size_t rank_of(const ComplexMatrix& hermitian, double cutoff = 1e-9) {
  std::size_t rank = 0;
  for (double lambda : eigh(hermitize(hermitian)).eigenvalues)
    if (lambda > cutoff) ++rank;
  return rank;
}

}  // namespace demo_detail

// ---------------------------------------------------------------------------
// Scenario runners. Each encodes one shipped guarantee with its tolerances
// pinned; the CLI demo command and the acceptance suite both run these.
// ---------------------------------------------------------------------------

/// Fourier masker on a random orthonormal basis: both marginals land on I/d
/// for every basis state, d = 2..6.
inline std::vector<DemoCheck> scenario_fourier_orthobasis() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  for (std::size_t d = 2; d <= 6; ++d) {
    const ComplexMatrix basis = random_unitary(d, 1000 + d);
    const Masker s = build_s_fn(basis, d);
    const MaskingReport report = verify_masking_pure(s, basis_states(basis), 1e-10);
    const double to_id =
        std::max(frobenius_distance(report.reference_marginal_a.matrix(), scaled_identity(d)),
                 frobenius_distance(report.reference_marginal_b.matrix(), scaled_identity(d)));
    check(out, "sfn d=" + std::to_string(d) + " masks the basis",
          report.verdict == Verdict::Masked && report.max_deviation <= 1e-10,
          "max_dev=" + fmt(report.max_deviation));
    check(out, "sfn d=" + std::to_string(d) + " marginals are I/d", to_id <= 1e-10,
          "dist=" + fmt(to_id));
  }
  return out;
}

/// What the 2-dimensional Fourier masker can and cannot absorb on top of its
/// basis: imaginary-weighted superpositions stay masked, real-weighted ones
/// break, and for d > 2 every nonorthogonal addition breaks.
inline std::vector<DemoCheck> scenario_fourier_maximal_sets() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(2024);
  const ComplexMatrix basis = random_unitary(2, 2001);
  const Masker s2 = build_s_fn(basis, 2);
  const ComplexVector psi1 = column(basis, 0);
  const ComplexVector psi2 = column(basis, 1);

  std::uniform_real_distribution<double> angle(0.12, 1.45);  // keeps |a|,|b| > 0.1
  double worst_masked = 0.0, worst_fail = 1.0;
  for (int t = 0; t < 20; ++t) {
    const double a = std::cos(angle(rng));
    const double b = std::sin(angle(rng));
    ComplexVector imag_mix(psi1.size());
    ComplexVector real_mix(psi1.size());
    for (std::size_t i = 0; i < psi1.size(); ++i) {
      imag_mix[i] = a * psi1[i] + Complex{0.0, 1.0} * b * psi2[i];
      real_mix[i] = a * psi1[i] + b * psi2[i];
    }
    const std::vector<PureState> masked_set = {
        PureState::normalized_from(psi1), PureState::normalized_from(psi2),
        PureState::normalized_from(imag_mix)};
    const std::vector<PureState> failing_set = {
        PureState::normalized_from(psi1), PureState::normalized_from(psi2),
        PureState::normalized_from(real_mix)};
    worst_masked = std::max(worst_masked, verify_masking_pure(s2, masked_set).max_deviation);
    worst_fail = std::min(worst_fail, verify_masking_pure(s2, failing_set).max_deviation);
  }
  check(out, "sfn d=2 masks a|1>+ib|2> mixes (20 draws)", worst_masked <= 1e-10,
        "max_dev=" + fmt(worst_masked));
  check(out, "sfn d=2 rejects real-weighted mixes", worst_fail > 1e-3,
        "min max_dev=" + fmt(worst_fail));

  for (std::size_t d = 3; d <= 4; ++d) {
    const ComplexMatrix bd = random_unitary(d, 2100 + d);
    const Masker sd = build_s_fn(bd, d);
    std::vector<PureState> set = basis_states(bd);
    set.push_back(PureState::normalized_from(
        vec_add(column(bd, 0), column(bd, 1))));  // (|1>+|2>)/sqrt(2) after normalize
    const MaskingReport report = verify_masking_pure(sd, set);
    check(out, "sfn d=" + std::to_string(d) + " rejects nonorthogonal additions",
          report.verdict == Verdict::NotMasked && report.max_deviation > 1e-3,
          "max_dev=" + fmt(report.max_deviation));
  }
  return out;
}

/// The pairing masker hides the whole phase hyperdisk of an amplitude profile:
/// each family is masked onto diag(r^2) marginals, two different profiles
/// cannot share it.
inline std::vector<DemoCheck> scenario_sharp_phase_families() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(3003);
  {
    // equal-amplitude family: the marginals collapse all the way to I/d
    const std::size_t d = 4;
    const ComplexMatrix id = ComplexMatrix::identity(d);
    const Masker s = build_s_sharp(id, id);
    const AmplitudeVector uniform(std::vector<double>(d, 0.5));
    std::vector<PureState> samples;
    for (int k = 0; k < 50; ++k) samples.push_back(sample_q_r(uniform, id, rng));
    const MaskingReport report = verify_masking_pure(s, samples, 1e-10);
    const double to_id =
        std::max(frobenius_distance(report.reference_marginal_a.matrix(), scaled_identity(d)),
                 frobenius_distance(report.reference_marginal_b.matrix(), scaled_identity(d)));
    check(out, "equal-amplitude family d=4 masks onto I/d",
          report.verdict == Verdict::Masked && report.max_deviation <= 1e-10 &&
              to_id <= 1e-10,
          "max_dev=" + fmt(report.max_deviation) + " dist=" + fmt(to_id));
  }
  for (std::size_t d = 2; d <= 4; ++d) {
    const ComplexMatrix e_basis = random_unitary(d, 3100 + d);
    const ComplexMatrix f_basis = random_unitary(d, 3200 + d);
    const Masker s = build_s_sharp(e_basis, f_basis);
    double worst_dev = 0.0, worst_marginal = 0.0;
    for (int fam = 0; fam < 10; ++fam) {
      const AmplitudeVector r = random_amplitude_vector(d, rng);
      std::vector<PureState> samples;
      for (int k = 0; k < 100; ++k) samples.push_back(sample_q_r(r, e_basis, rng));
      const MaskingReport report = verify_masking_pure(s, samples, 1e-10);
      worst_dev = std::max(worst_dev, report.max_deviation);
      ComplexMatrix expect_a(d, d), expect_b(d, d);
      for (std::size_t k = 0; k < d; ++k) {
        const ComplexVector ek = column(e_basis, k);
        const ComplexVector fk = column(f_basis, k);
        expect_a += outer_product(ek, ek) * (r[k] * r[k]);
        expect_b += outer_product(fk, fk) * (r[k] * r[k]);
      }
      worst_marginal = std::max(
          {worst_marginal,
           frobenius_distance(report.reference_marginal_a.matrix(), expect_a),
           frobenius_distance(report.reference_marginal_b.matrix(), expect_b)});
      if (report.verdict != Verdict::Masked) worst_dev = std::max(worst_dev, 1.0);
    }
    check(out, "sharp d=" + std::to_string(d) + " masks 10 phase families",
          worst_dev <= 1e-10, "max_dev=" + fmt(worst_dev));
    check(out, "sharp d=" + std::to_string(d) + " marginals are sum r_k^2 projectors",
          worst_marginal <= 1e-10, "dist=" + fmt(worst_marginal));

    AmplitudeVector r1 = random_amplitude_vector(d, rng);
    AmplitudeVector r2 = random_amplitude_vector(d, rng);
    while (amplitude_profile_gap(r1, r2) < 0.05) r2 = random_amplitude_vector(d, rng);
    std::vector<PureState> mixed;
    for (int k = 0; k < 10; ++k) mixed.push_back(sample_q_r(r1, e_basis, rng));
    for (int k = 0; k < 10; ++k) mixed.push_back(sample_q_r(r2, e_basis, rng));
    const MaskingReport report = verify_masking_pure(s, mixed);
    check(out, "sharp d=" + std::to_string(d) + " rejects a union of two families",
          report.verdict == Verdict::NotMasked && report.max_deviation > 1e-3,
          "max_dev=" + fmt(report.max_deviation));
  }
  return out;
}

namespace demo_detail {

struct EquivalenceCase {
  Masker masker;
  std::vector<PureState> states;
};

/// Randomized masked-or-broken verification cases. Broken cases are resampled
/// until their deviation clears 1e-3, so both sides of the equivalence sit far
/// from the tolerance.
inline EquivalenceCase make_equivalence_case(std::size_t index, Rng& rng) {
  const std::size_t kind = index % 4;
  const std::size_t d = 2 + (index / 4) % 3;
  const bool broken = (index % 2) == 1;

  for (int attempt = 0; attempt < 100; ++attempt) {
    EquivalenceCase c;
    const ComplexMatrix e_basis = random_unitary(d, rng);
    if (kind == 0) {
      c.masker = build_s_fn(e_basis, d);
      c.states = basis_states(e_basis);
    } else if (kind == 1) {
      c.masker = build_s_sharp(e_basis, random_unitary(d, rng));
      const AmplitudeVector r = random_amplitude_vector(d, rng, 0.02);
      for (int k = 0; k < 3; ++k) c.states.push_back(sample_q_r(r, e_basis, rng));
    } else if (kind == 2) {
      c.masker = build_s_diamond(e_basis, random_unitary(d, rng));
      c.states = basis_states(e_basis);
    } else {
      std::uniform_int_distribution<std::size_t> db_draw(2, 4);
      c.masker = random_isometry(d, db_draw(rng), rng);
      const PureState psi = random_pure(d, rng);
      std::uniform_real_distribution<double> phase(-3.0, 3.0);
      c.states.push_back(psi);
      c.states.push_back(PureState::normalized_from(
          scaled(psi.amplitudes(), std::polar(1.0, phase(rng)))));
    }
    if (!broken) return c;
    c.states.push_back(random_pure(d, rng));
    if (verify_masking_pure(c.masker, c.states).max_deviation > 1e-3) return c;
  }
  throw std::runtime_error("make_equivalence_case: could not reach the failure margin");
}

}  // namespace demo_detail

/// The structural certificate (common coefficients + common per-coefficient
/// frames on both sides) agrees with the marginal-comparison verdict on 200
/// randomized cases.
inline std::vector<DemoCheck> scenario_certificate_equivalence() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(4004);
  std::size_t disagreements = 0;
  std::size_t masked_seen = 0, broken_seen = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const EquivalenceCase c = make_equivalence_case(i, rng);
    const MaskingReport report = verify_masking_pure(c.masker, c.states, 1e-9);
    const Theorem21Certificate cert = theorem21_certificate(c.masker, c.states, 1e-9);
    if (cert.holds != (report.verdict == Verdict::Masked)) ++disagreements;
    (report.verdict == Verdict::Masked ? masked_seen : broken_seen)++;
  }
  check(out, "certificate agrees with the verdict on 200 cases", disagreements == 0,
        "disagreements=" + std::to_string(disagreements));
  check(out, "both verdicts are exercised", masked_seen >= 50 && broken_seen >= 50,
        "masked=" + std::to_string(masked_seen) + " broken=" + std::to_string(broken_seen));
  return out;
}

/// The four-state family on an orthogonal pair defeats every masker we can
/// build plus 100 seeded random isometries.
inline std::vector<DemoCheck> scenario_four_state_obstruction() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  const PureState zero(basis_vector(2, 0));
  const PureState one(basis_vector(2, 1));
  const std::vector<PureState> family = counterexample_states(zero, one);
  const ComplexMatrix id2 = ComplexMatrix::identity(2);

  const double h = 1.0 / std::sqrt(2.0);
  const std::vector<std::pair<std::string, Masker>> named = {
      {"sfn", build_s_fn(id2, 2)},
      {"sharp", build_s_sharp(id2, id2)},
      {"diamond", build_s_diamond(id2, id2)},
      {"remark24", build_remark24_operator()},
      {"multiparty", multiparty_masker(2)},
      {"injection",
       build_injection_masker({zero, PureState(ComplexVector{Complex(h, 0.0),
                                                             Complex(h, 0.0)})})},
  };
  for (const auto& [name, s] : named) {
    const MaskingReport report = verify_masking_pure(s, family);
    check(out, "four-state family defeats " + name,
          report.verdict == Verdict::NotMasked && report.max_deviation > 1e-3,
          "max_dev=" + fmt(report.max_deviation));
  }

  double weakest = 1.0;
  bool all_rejected = true;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::size_t d_b = 2 + i % 3;
    const Masker s = random_isometry(2, d_b, 5000 + i);
    const MaskingReport report = verify_masking_pure(s, family);
    weakest = std::min(weakest, report.max_deviation);
    all_rejected = all_rejected && report.verdict == Verdict::NotMasked;
  }
  check(out, "four-state family defeats 100 random isometries",
        all_rejected && weakest > 1e-3, "min max_dev=" + fmt(weakest));
  return out;
}

/// The explicit qubit operator with constant A-side marginal: the fixed
/// marginal on one side is necessary but not sufficient, its B-side marginals
/// split the four-state family apart.
inline std::vector<DemoCheck> scenario_remark24_structure() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  const Masker s = build_remark24_operator();
  const std::vector<PureState> family =
      counterexample_states(PureState(basis_vector(2, 0)), PureState(basis_vector(2, 1)));

  double worst_a = 0.0;
  std::vector<ComplexMatrix> b_marginals;
  for (const PureState& psi : family) {
    const ComplexVector img = s.apply(psi);
    const ComplexMatrix density = outer_product(img, img);
    worst_a = std::max(worst_a,
                       frobenius_distance(partial_trace(density, 2, 4, TraceSide::TraceOutB),
                                          scaled_identity(2)));
    b_marginals.push_back(partial_trace(density, 2, 4, TraceSide::TraceOutA));
  }
  double b_spread = 0.0;
  for (std::size_t i = 0; i < b_marginals.size(); ++i)
    for (std::size_t j = i + 1; j < b_marginals.size(); ++j)
      b_spread = std::max(b_spread, frobenius_distance(b_marginals[i], b_marginals[j]));

  check(out, "A-side marginal is I/2 on all four states", worst_a <= 1e-10,
        "dist=" + fmt(worst_a));
  check(out, "B-side marginals differ across the family", b_spread > 0.1,
        "spread=" + fmt(b_spread));
  const double smin = min_singular_value(s.matrix);
  check(out, "operator is injective", smin > 0.1, "min_sv=" + fmt(smin));
  const MaskingReport report = verify_masking_pure(s, family);
  check(out, "family still is not masked",
        report.verdict == Verdict::NotMasked && report.max_deviation > 0.1,
        "max_dev=" + fmt(report.max_deviation));
  return out;
}

/// The 2n-party construction hides every pure input from every single party.
inline std::vector<DemoCheck> scenario_multiparty_masking() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  const std::size_t n = 2;
  const ComplexMatrix s = build_multiparty_masker(n);
  const double iso = max_abs_diff(s.adjoint() * s, ComplexMatrix::identity(n));
  check(out, "multiparty n=2 map is an isometry", iso <= 1e-10, "dist=" + fmt(iso));

  const std::vector<std::size_t> dims(2 * n, n);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const PureState psi = random_pure(n, 6000 + i);
    const ComplexVector img = s * psi.amplitudes();
    for (std::size_t party = 0; party < 2 * n; ++party)
      worst = std::max(worst, frobenius_distance(single_party_marginal(img, dims, party),
                                                 scaled_identity(n)));
  }
  check(out, "all 4 single-party marginals are I/2 over 50 random inputs", worst <= 1e-9,
        "max_dist=" + fmt(worst));
  return out;
}

/// Commuting mixed-state sets are masked by the Fourier-phased pairing masker;
/// commutativity is not necessary, a noncommuting equal-profile pair is masked
/// by the plain pairing masker.
inline std::vector<DemoCheck> scenario_commuting_masking() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(7007);
  double worst_dev = 0.0, worst_id = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + t % 4;
    const ComplexMatrix eigenbasis = random_unitary(d, rng);
    const Masker s = build_s_diamond(eigenbasis, ComplexMatrix::identity(d));
    std::vector<DensityMatrix> members;
    for (int k = 0; k < 3; ++k) {
      const ProbabilityVector p = random_probability_vector(d, rng);
      members.push_back(DensityMatrix(
          d, hermitize(eigenbasis * ComplexMatrix::diagonal(p.entries()) *
                       eigenbasis.adjoint())));
    }
    const MaskingReport report = verify_masking_mixed(s, members, 1e-10);
    worst_dev = std::max(worst_dev, report.max_deviation);
    if (report.verdict != Verdict::Masked) worst_dev = std::max(worst_dev, 1.0);
    worst_id = std::max(worst_id, frobenius_distance(report.reference_marginal_a.matrix(),
                                                     scaled_identity(d)));
  }
  check(out, "diamond masks 20 random commuting triples", worst_dev <= 1e-10,
        "max_dev=" + fmt(worst_dev));
  check(out, "A marginal is I/d on commuting sets", worst_id <= 1e-10,
        "dist=" + fmt(worst_id));

  // Equal-amplitude pair with phase twist: definitely noncommuting, yet the
  // pairing masker hides both.
  const std::size_t d = 3;
  const ComplexMatrix id = ComplexMatrix::identity(d);
  ComplexVector psi1(d), psi2(d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t k = 0; k < d; ++k) {
    psi1[k] = amp;
    psi2[k] = k == 0 ? Complex{amp, 0.0} : Complex{0.0, amp};
  }
  const DensityMatrix rho1 = DensityMatrix::pure(PureState::normalized_from(psi1));
  const DensityMatrix rho2 = DensityMatrix::pure(PureState::normalized_from(psi2));
  const ComplexMatrix commutator =
      rho1.matrix() * rho2.matrix() - rho2.matrix() * rho1.matrix();
  check(out, "witness pair does not commute", commutator.frobenius_norm() > 0.1,
        "norm=" + fmt(commutator.frobenius_norm()));
  const MaskingReport report =
      verify_masking_mixed(build_s_sharp(id, id), {rho1, rho2}, 1e-10);
  check(out, "sharp masks the noncommuting pair",
        report.verdict == Verdict::Masked && report.max_deviation <= 1e-10,
        "max_dev=" + fmt(report.max_deviation));
  return out;
}

/// Linearly independent sets are masked after Loewdin orthogonalization: the
/// injection masker equalizes the renormalized image marginals.
inline std::vector<DemoCheck> scenario_injection_masking() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(8008);
  double worst_dev = 0.0, worst_gram = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + t % 3;
    std::vector<PureState> states;
    for (;;) {
      states.clear();
      for (std::size_t k = 0; k < d; ++k) states.push_back(random_pure(d, rng));
      std::vector<ComplexVector> cols;
      for (const PureState& s : states) cols.push_back(s.amplitudes());
      const ComplexMatrix p = columns_matrix(cols);
      if (eigh(hermitize(p.adjoint() * p)).eigenvalues.back() > 1e-3) break;
    }
    const Masker s = build_injection_masker(states);
    const ComplexMatrix& e_basis = *s.basis_a;
    worst_gram = std::max(worst_gram,
                          frobenius_distance(e_basis.adjoint() * e_basis,
                                             ComplexMatrix::identity(d)));
    const MaskingReport report = verify_masking_pure(s, states, 1e-8);
    worst_dev = std::max(worst_dev, report.max_deviation);
    if (report.verdict != Verdict::Masked) worst_dev = std::max(worst_dev, 1.0);
  }
  check(out, "injection masks 20 random independent sets", worst_dev <= 1e-8,
        "max_dev=" + fmt(worst_dev));
  check(out, "Loewdin basis is orthonormal", worst_gram <= 1e-9,
        "residual=" + fmt(worst_gram));
  return out;
}

/// Fixed-diagonal membership in the pairing masker's basis is exactly the
/// masking verdict against the diagonal representative.
inline std::vector<DemoCheck> scenario_qp_oracle() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(9009);
  std::size_t disagreements = 0, members = 0, outsiders = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    const std::size_t d = 2 + i % 3;
    const ComplexMatrix e_basis = random_unitary(d, rng);
    const Masker s = build_s_sharp(e_basis, random_unitary(d, rng));
    const ProbabilityVector p = random_probability_vector(d, rng, 0.05);
    const DensityMatrix anchor(
        d, hermitize(e_basis * ComplexMatrix::diagonal(p.entries()) * e_basis.adjoint()));

    DensityMatrix rho = anchor;
    if (i % 2 == 0) {
      rho = sample_q_p(p, e_basis, rng);
    } else {
      for (;;) {
        const DensityMatrix candidate = random_density(d, d, rng);
        double gap = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const ComplexVector ek = column(e_basis, k);
          gap = std::max(gap, std::abs(inner_product(ek, candidate.matrix() * ek).real() -
                                       p[k]));
        }
        if (gap > 1e-3) {
          rho = candidate;
          break;
        }
      }
    }
    const bool member = membership_q_p(rho, p, e_basis, 1e-10);
    const bool masked =
        verify_masking_mixed(s, {anchor, rho}, 1e-9).verdict == Verdict::Masked;
    if (member != masked) ++disagreements;
    (member ? members : outsiders)++;
  }
  check(out, "diagonal membership matches the verdict on 500 densities",
        disagreements == 0, "disagreements=" + std::to_string(disagreements));
  check(out, "both membership outcomes are exercised", members >= 100 && outsiders >= 100,
        "members=" + std::to_string(members) + " outsiders=" + std::to_string(outsiders));
  return out;
}

/// QFT-frame membership matches the Fourier-phased masker's verdict, and the
/// conjugated matrix really is the matrix of the state in the epsilon frame.
inline std::vector<DemoCheck> scenario_qq_oracle() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(9910);
  std::size_t disagreements = 0, members = 0, outsiders = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    const std::size_t d = 2 + i % 3;
    const ComplexMatrix id = ComplexMatrix::identity(d);
    const Masker s = build_s_diamond(id, id);
    const ProbabilityVector q = random_probability_vector(d, rng, 0.05);
    const ComplexMatrix f = qft_matrix(d);
    const DensityMatrix anchor(
        d, hermitize(f.adjoint() * ComplexMatrix::diagonal(q.entries()) * f));

    DensityMatrix rho = anchor;
    if (i % 2 == 0) {
      rho = sample_q_q(q, rng);
    } else {
      for (;;) {
        const DensityMatrix candidate = random_density(d, d, rng);
        const ComplexMatrix conj = qft_conjugate(candidate);
        double gap = 0.0;
        for (std::size_t k = 0; k < d; ++k)
          gap = std::max(gap, std::abs(conj(k, k).real() - q[k]));
        if (gap > 1e-3) {
          rho = candidate;
          break;
        }
      }
    }
    const bool member = membership_q_q(rho, q, 1e-10);
    const bool masked =
        verify_masking_mixed(s, {anchor, rho}, 1e-9).verdict == Verdict::Masked;
    if (member != masked) ++disagreements;
    (member ? members : outsiders)++;
  }
  check(out, "QFT-frame membership matches the verdict on 500 densities",
        disagreements == 0, "disagreements=" + std::to_string(disagreements));
  check(out, "both membership outcomes are exercised", members >= 100 && outsiders >= 100,
        "members=" + std::to_string(members) + " outsiders=" + std::to_string(outsiders));

  // Frame identity: [<eps_i|M|eps_j>] = F M F†, with the epsilon vectors
  // built explicitly as conjugated QFT rows.
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t d = 2 + i % 3;
    const DensityMatrix rho = random_density(d, d, rng);
    const ComplexMatrix f = qft_matrix(d);
    ComplexMatrix frame_form(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        ComplexVector eps_a(d), eps_b(d);
        for (std::size_t k = 0; k < d; ++k) {
          eps_a[k] = std::conj(f(a, k));
          eps_b[k] = std::conj(f(b, k));
        }
        frame_form(a, b) = inner_product(eps_a, rho.matrix() * eps_b);
      }
    worst = std::max(worst, max_abs_diff(frame_form, qft_conjugate(rho)));
  }
  check(out, "epsilon-frame matrix equals the QFT conjugation (100 densities)",
        worst <= 1e-12, "max_diff=" + fmt(worst));
  return out;
}

/// No isometric masker can make both side channels constant: at least one of
/// the matrix-unit probes deviates.
inline std::vector<DemoCheck> scenario_trace_type_obstruction() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  for (std::size_t d = 2; d <= 4; ++d) {
    const ComplexMatrix e_basis = random_unitary(d, 11000 + d);
    const ComplexMatrix f_basis = random_unitary(d, 11100 + d);
    const std::vector<std::pair<std::string, Masker>> named = {
        {"sfn", build_s_fn(e_basis, d)},
        {"sharp", build_s_sharp(e_basis, f_basis)},
        {"diamond", build_s_diamond(e_basis, f_basis)},
    };
    for (const auto& [name, s] : named) {
      const double dev_a = trace_type_deviation(s, MarginalSide::A);
      const double dev_b = trace_type_deviation(s, MarginalSide::B);
      check(out, name + " d=" + std::to_string(d) + " has a non-trace-type side",
            std::max(dev_a, dev_b) > 1e-3,
            "dev_a=" + fmt(dev_a) + " dev_b=" + fmt(dev_b));
    }
  }
  for (std::size_t n = 2; n <= 3; ++n) {
    const Masker s = multiparty_masker(n);
    const double dev_a = trace_type_deviation(s, MarginalSide::A);
    const double dev_b = trace_type_deviation(s, MarginalSide::B);
    check(out, "multiparty n=" + std::to_string(n) + " has a non-trace-type side",
          std::max(dev_a, dev_b) > 1e-3, "dev_a=" + fmt(dev_a) + " dev_b=" + fmt(dev_b));
  }
  return out;
}

/// Co-purifications of one reduced state align over a common left frame with
/// shared coefficients, reconstructing both inputs.
inline std::vector<DemoCheck> scenario_purification_alignment() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(12012);
  std::uniform_real_distribution<double> cdraw(0.05, 1.0);
  double worst = 0.0, worst_marginal = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = (t % 2 == 0) ? 3 : 4;
    const std::size_t rank = 2 + (t / 2) % 2;
    const ComplexMatrix left = random_unitary(d, rng);
    const ComplexMatrix right = random_unitary(d, rng);
    std::vector<double> c(rank);
    double s = 0.0;
    for (double& x : c) {
      x = cdraw(rng);
      s += x;
    }
    ComplexVector psi1(d * d, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < rank; ++j) {
      const ComplexVector term = tensor(column(left, j), column(right, j));
      for (std::size_t i = 0; i < term.size(); ++i)
        psi1[i] += std::sqrt(c[j] / s) * term[i];
    }
    const ComplexMatrix w = random_unitary(d, rng);
    ComplexVector psi2(d * d, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t b = 0; b < d; ++b)
        for (std::size_t bp = 0; bp < d; ++bp)
          psi2[i * d + b] += w(b, bp) * psi1[i * d + bp];

    const PureState p1 = PureState::normalized_from(psi1);
    const PureState p2 = PureState::normalized_from(psi2);
    const AlignedPurifications ap = align_purifications(p1, p2, d, d);
    const double r1 = vec_norm(vec_sub(aligned_reconstruction(ap, 1), p1.amplitudes()));
    const double r2 = vec_norm(vec_sub(aligned_reconstruction(ap, 2), p2.amplitudes()));
    worst = std::max({worst, r1, r2});

    ComplexMatrix rho_a(d, d);
    for (std::size_t j = 0; j < ap.coefficients.size(); ++j) {
      const ComplexVector ej = column(ap.left_frame, j);
      rho_a += outer_product(ej, ej) * (ap.coefficients[j] * ap.coefficients[j]);
    }
    worst_marginal = std::max(
        worst_marginal,
        frobenius_distance(rho_a, partial_trace(p1.projector(), d, d,
                                                TraceSide::TraceOutB)));
  }
  check(out, "100 co-purification pairs reconstruct through one left frame",
        worst <= 1e-9, "max_residual=" + fmt(worst));
  check(out, "aligned form reproduces the reduced state", worst_marginal <= 1e-9,
        "max_dist=" + fmt(worst_marginal));
  return out;
}

/// Every image of a masked set under an isometric masker carries Schmidt rank
/// equal to the rank of the shared marginal; images are product states exactly
/// when that marginal is pure.
inline std::vector<DemoCheck> scenario_image_entanglement() {
  using namespace demo_detail;
  std::vector<DemoCheck> out;
  Rng rng(13013);

  struct Case {
    std::string name;
    Masker masker;
    std::vector<PureState> states;
  };
  std::vector<Case> cases;
  for (std::size_t d = 2; d <= 4; ++d) {
    const ComplexMatrix basis = random_unitary(d, rng);
    cases.push_back({"sfn d=" + std::to_string(d), build_s_fn(basis, d),
                     basis_states(basis)});
  }
  {
    const std::size_t d = 3;
    const ComplexMatrix e_basis = random_unitary(d, rng);
    const ComplexMatrix f_basis = random_unitary(d, rng);
    const Masker sharp = build_s_sharp(e_basis, f_basis);
    const AmplitudeVector full({0.6, std::sqrt(1.0 - 0.36 - 0.09), 0.3});
    const AmplitudeVector deficient({0.8, 0.6, 0.0});
    const AmplitudeVector pure_profile({1.0, 0.0, 0.0});
    for (const auto& [label, r] :
         std::vector<std::pair<std::string, AmplitudeVector>>{
             {"full", full}, {"rank2", deficient}, {"pure", pure_profile}}) {
      std::vector<PureState> samples;
      for (int k = 0; k < 10; ++k) samples.push_back(sample_q_r(r, e_basis, rng));
      cases.push_back({"sharp r=" + label, sharp, samples});
    }
  }

  bool all_ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const MaskingReport report = verify_masking_pure(c.masker, c.states);
    if (report.verdict != Verdict::Masked) {
      all_ok = false;
      detail = c.name + " unexpectedly not masked";
      break;
    }
    const std::size_t marginal_rank = rank_of(report.reference_marginal_a.matrix());
    for (const PureState& psi : c.states) {
      const PureState image = PureState::normalized_from(c.masker.apply(psi));
      const std::size_t r = schmidt_rank(image, c.masker.d_a, c.masker.d_b);
      if (r != marginal_rank) {
        all_ok = false;
        detail = c.name + ": image rank " + std::to_string(r) + " vs marginal rank " +
                 std::to_string(marginal_rank);
        break;
      }
      const bool product = r == 1;
      const bool marginal_pure = marginal_rank == 1;
      if (product != marginal_pure) {
        all_ok = false;
        detail = c.name + ": product/purity mismatch";
        break;
      }
    }
    if (!all_ok) break;
  }
  check(out, "image Schmidt rank equals the marginal rank on every masked set", all_ok,
        all_ok ? "cases=" + std::to_string(cases.size()) : detail);
  return out;
}

// ---------------------------------------------------------------------------
// Demo registry
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names = {
      "prop21", "example21", "thm21", "thm22",   "remark24", "multiparty",
      "thm31",  "cor31",     "thm32", "thm33",   "cor23",    "lemma21"};
  return names;
}

inline DemoResult run_demo(const std::string& name) {
  DemoResult result;
  result.name = name;
  auto append = [&](std::vector<DemoCheck> checks) {
    for (DemoCheck& c : checks) result.checks.push_back(std::move(c));
  };
  if (name == "prop21") {
    append(scenario_fourier_orthobasis());
    append(scenario_fourier_maximal_sets());
  } else if (name == "example21") {
    append(scenario_sharp_phase_families());
    append(scenario_image_entanglement());
  } else if (name == "thm21") {
    append(scenario_certificate_equivalence());
  } else if (name == "thm22") {
    append(scenario_four_state_obstruction());
  } else if (name == "remark24") {
    append(scenario_remark24_structure());
  } else if (name == "multiparty") {
    append(scenario_multiparty_masking());
  } else if (name == "thm31") {
    append(scenario_commuting_masking());
  } else if (name == "cor31") {
    append(scenario_injection_masking());
  } else if (name == "thm32") {
    append(scenario_qp_oracle());
  } else if (name == "thm33") {
    append(scenario_qq_oracle());
  } else if (name == "cor23") {
    append(scenario_trace_type_obstruction());
  } else if (name == "lemma21") {
    append(scenario_purification_alignment());
  } else {
    throw std::invalid_argument("unknown demo: " + name);
  }
  return result;
}

}  // namespace masklab
