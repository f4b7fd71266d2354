#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "masklab/io.hpp"

using namespace masklab;

namespace {

std::filesystem::path unique_path(const std::string& name) {
  static int counter = 0;
  const auto dir = std::filesystem::path(::testing::TempDir()) / "masklab_io";
  std::filesystem::create_directories(dir);
  return dir / (name + "_" + std::to_string(counter++) + ".json");
}

}  // namespace

TEST(JsonEncodingTest, ComplexRoundTripIsLossless) {
  const Complex z(0.12345678901234567, -3.0000000000000004e-7);
  EXPECT_EQ(complex_from_json(parse_json(complex_to_json(z).dump())), z);
}

TEST(JsonEncodingTest, MatrixRoundTripIsLossless) {
  Rng rng(1);
  ComplexMatrix m(3, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) m(i, j) = gaussian_complex(rng);
  const ComplexMatrix back = matrix_from_json(parse_json(matrix_to_json(m).dump()));
  EXPECT_EQ(back.entries(), m.entries());
}

TEST(StateFileTest, PureRoundTrip) {
  StateFile sf;
  sf.kind = StateFileKind::Pure;
  sf.d_a = 3;
  Rng rng(2);
  for (int k = 0; k < 4; ++k) sf.pure_states.push_back(random_pure(3, rng));
  const auto path = unique_path("pure");
  save_state_file(path, sf);
  const StateFile back = load_state_file(path);
  ASSERT_EQ(back.pure_states.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k)
    EXPECT_LE(vec_norm(vec_sub(back.pure_states[k].amplitudes(),
                               sf.pure_states[k].amplitudes())),
              1e-15);
}

TEST(StateFileTest, MixedRoundTripWithSymmetrization) {
  StateFile sf;
  sf.kind = StateFileKind::Mixed;
  sf.d_a = 2;
  sf.mixed_states.push_back(DensityMatrix(ComplexMatrix::diagonal({0.25, 0.75})));
  const auto path = unique_path("mixed");
  save_state_file(path, sf);
  EXPECT_EQ(load_state_file(path).mixed_states.size(), 1u);
}

TEST(StateFileTest, LoaderNormalizationThresholds) {
  // norm error above 1e-8: rejected
  Json bad;
  bad["version"] = "1";
  bad["kind"] = "pure";
  bad["dims"]["d_a"] = 2;
  bad["states"] = Json::array({Json::array({Json::array({0.9, 0.0}),
                                            Json::array({0.0, 0.0})})});
  EXPECT_THROW(state_file_from_json(bad), FormatError);

  // norm error between 1e-10 and 1e-8: renormalized with a warning
  Json warned = bad;
  const double amp = std::sqrt(1.0 + 5e-9);
  warned["states"] = Json::array({Json::array({Json::array({amp, 0.0}),
                                               Json::array({0.0, 0.0})})});
  std::ostringstream warn_stream;
  const StateFile sf = state_file_from_json(warned, warn_stream);
  EXPECT_NEAR(vec_norm(sf.pure_states[0].amplitudes()), 1.0, 1e-12);
  EXPECT_NE(warn_stream.str().find("renormalizing"), std::string::npos);

  // norm error below 1e-10: silent
  Json quiet = bad;
  quiet["states"] = Json::array({Json::array({Json::array({1.0, 0.0}),
                                              Json::array({0.0, 0.0})})});
  std::ostringstream quiet_stream;
  state_file_from_json(quiet, quiet_stream);
  EXPECT_TRUE(quiet_stream.str().empty());
}

TEST(StateFileTest, RejectsInvalidDensities) {
  Json j;
  j["version"] = "1";
  j["kind"] = "mixed";
  j["dims"]["d_a"] = 2;
  // trace 2 != 1
  j["states"] = Json::array({Json::array(
      {Json::array({Json::array({1.0, 0.0}), Json::array({0.0, 0.0})}),
       Json::array({Json::array({0.0, 0.0}), Json::array({1.0, 0.0})})})});
  EXPECT_THROW(state_file_from_json(j), FormatError);
}

TEST(StateFileTest, MalformedJsonIsAFormatError) {
  const auto path = unique_path("truncated");
  write_text_file_atomic(path, "{\"version\": \"1\", \"kind\": ");
  EXPECT_THROW(load_state_file(path), FormatError);
  EXPECT_THROW(load_state_file(unique_path("missing")), IoError);
}

TEST(MaskerFileTest, RoundTripValidatesOnLoad) {
  const ComplexMatrix id = ComplexMatrix::identity(3);
  const Masker s = build_s_fn(id, 3);
  const auto path = unique_path("masker");
  write_json_atomic(path, masker_file_to_json(s, Json{{"d", 3}}));
  const Masker back = load_masker_file(path);
  EXPECT_EQ(back.kind, MaskerKind::Sfn);
  EXPECT_LE(max_abs_diff(back.matrix, s.matrix), 0.0);
  EXPECT_TRUE(is_isometry(back.matrix, 1e-10));
}

TEST(MaskerFileTest, RejectsNonInjectiveMatrix) {
  Json j;
  j["version"] = "1";
  Json m;
  m["kind"] = "custom";
  m["d_a"] = 2;
  m["d_b"] = 1;
  m["matrix"] = Json::array({Json::array({Json::array({1.0, 0.0}), Json::array({1.0, 0.0})}),
                             Json::array({Json::array({0.0, 0.0}), Json::array({0.0, 0.0})})});
  j["masker"] = m;
  const auto path = unique_path("degenerate");
  write_json_atomic(path, j);
  EXPECT_THROW(load_masker_file(path), FormatError);
}

TEST(ReportFileTest, RoundTripsLosslessly) {
  const ComplexMatrix id = ComplexMatrix::identity(2);
  const Masker s = build_s_sharp(id, id);
  const std::vector<PureState> states = {PureState(basis_vector(2, 0)),
                                         PureState(basis_vector(2, 1))};
  const MaskingReport report = verify_masking_pure(s, states, 1e-9);
  const Json j = report_to_json(report, s);
  const auto path = unique_path("report");
  write_json_atomic(path, j);
  const LoadedReport back = load_report_file(path);
  EXPECT_EQ(back.verdict, report.verdict);
  EXPECT_EQ(back.tolerance, report.tolerance);
  EXPECT_EQ(back.max_deviation, report.max_deviation);
  EXPECT_EQ(back.per_state_deviations.size(), report.per_state_deviations.size());
  // serialize what was loaded: bytes must match
  const Json again = report_to_json(
      MaskingReport{DensityMatrix(hermitize(back.reference_marginal_a)),
                    DensityMatrix(hermitize(back.reference_marginal_b)),
                    back.per_state_deviations, back.max_deviation, back.verdict,
                    back.tolerance},
      back.masker);
  EXPECT_EQ(again.dump(), j.dump());
}

TEST(AtomicWriteTest, LeavesNoTempFileBehind) {
  const auto path = unique_path("atomic");
  write_text_file_atomic(path, "payload");
  EXPECT_TRUE(std::filesystem::exists(path));
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  EXPECT_EQ(read_text_file(path), "payload");
}
