// End-to-end guarantees of the toolkit, one test per shipped claim. Each
// scenario pins its tolerances inside include/masklab/demos.hpp and is also
// reachable through `mask-lab demo <name>`.

#include <gtest/gtest.h>

#include "masklab/demos.hpp"

namespace {

void run_checks(const std::vector<masklab::DemoCheck>& checks) {
  ASSERT_FALSE(checks.empty());
  for (const masklab::DemoCheck& c : checks)
    EXPECT_TRUE(c.pass) << c.name << " [" << c.detail << "]";
}

}  // namespace

TEST(Acceptance, FourierMaskerMasksRandomOrthonormalBases) {
  run_checks(masklab::scenario_fourier_orthobasis());
}

TEST(Acceptance, FourierMaskerMaximalSetBoundaries) {
  run_checks(masklab::scenario_fourier_maximal_sets());
}

TEST(Acceptance, PairingMaskerHidesPhaseFamilies) {
  run_checks(masklab::scenario_sharp_phase_families());
}

TEST(Acceptance, StructuralCertificateMatchesTheVerdict) {
  run_checks(masklab::scenario_certificate_equivalence());
}

TEST(Acceptance, FourStateFamilyDefeatsEveryMasker) {
  run_checks(masklab::scenario_four_state_obstruction());
  run_checks(masklab::scenario_remark24_structure());
}

TEST(Acceptance, MultipartyConstructionHidesEveryInput) {
  run_checks(masklab::scenario_multiparty_masking());
}

TEST(Acceptance, CommutingMixedSetsAreMasked) {
  run_checks(masklab::scenario_commuting_masking());
}

TEST(Acceptance, IndependentSetsAreMaskedByAnInjection) {
  run_checks(masklab::scenario_injection_masking());
}

TEST(Acceptance, MixedMembershipOraclesMatchVerification) {
  run_checks(masklab::scenario_qp_oracle());
  run_checks(masklab::scenario_qq_oracle());
}

TEST(Acceptance, NoIsometryHidesBothSideChannels) {
  run_checks(masklab::scenario_trace_type_obstruction());
}

TEST(Acceptance, CoPurificationsAlignOverOneFrame) {
  run_checks(masklab::scenario_purification_alignment());
}

TEST(Acceptance, MaskedImagesCarryTheMarginalRank) {
  run_checks(masklab::scenario_image_entanglement());
}
