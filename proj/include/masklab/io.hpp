#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "masklab/masker.hpp"
#include "masklab/matrix.hpp"
#include "masklab/states.hpp"
#include "masklab/verify.hpp"

namespace masklab {

// Insertion-ordered JSON keeps output files byte-stable for a fixed input.
using Json = nlohmann::ordered_json;

/// Unreadable/unwritable files and other OS-level failures (CLI exit 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structurally invalid content (CLI exit 2).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- JSON encoding of the core types -----------------------------------------

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("expected a complex entry encoded as [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Complex z : v) out.push_back(complex_to_json(z));
  return out;
}

inline ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("expected a nonempty vector");
  ComplexVector v;
  v.reserve(j.size());
  for (const Json& e : j) v.push_back(complex_from_json(e));
  return v;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("expected a nonempty matrix");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  ComplexVector entries;
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || row.empty()) throw FormatError("expected matrix rows as arrays");
    if (i == 0) {
      cols = row.size();
      entries.reserve(rows * cols);
    } else if (row.size() != cols) {
      throw FormatError("ragged matrix rows");
    }
    for (const Json& e : row) entries.push_back(complex_from_json(e));
  }
  try {
    return ComplexMatrix(rows, cols, std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

// -- file primitives -----------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + path.string());
  return buf.str();
}

/// Writes through a temp file in the same directory, then renames into place.
inline void write_text_file_atomic(const std::filesystem::path& path,
                                   const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failure: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move into place: " + path.string() + " (" + ec.message() + ")");
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

inline void write_json_atomic(const std::filesystem::path& path, const Json& j) {
  write_text_file_atomic(path, j.dump(2) + "\n");
}

// -- state files -----------------------------------------------------------------

enum class StateFileKind { Pure, Mixed };

struct StateFile {
  std::string version = "1";
  StateFileKind kind = StateFileKind::Pure;
  std::size_t d_a = 0;
  std::optional<std::size_t> d_b;
  std::vector<PureState> pure_states;
  std::vector<DensityMatrix> mixed_states;
};

inline Json state_file_to_json(const StateFile& sf) {
  Json j;
  j["version"] = sf.version;
  j["kind"] = sf.kind == StateFileKind::Pure ? "pure" : "mixed";
  Json dims;
  dims["d_a"] = sf.d_a;
  if (sf.d_b) dims["d_b"] = *sf.d_b;
  j["dims"] = dims;
  Json states = Json::array();
  if (sf.kind == StateFileKind::Pure)
    for (const PureState& s : sf.pure_states) states.push_back(vector_to_json(s.amplitudes()));
  else
    for (const DensityMatrix& m : sf.mixed_states) states.push_back(matrix_to_json(m.matrix()));
  j["states"] = states;
  return j;
}

/// Pure entries are renormalized on load: rejected above 1e-8 off unit norm,
/// fixed silently below 1e-10, fixed with a warning in between. Mixed entries
/// are symmetrized then held to the density-matrix invariants.
inline StateFile state_file_from_json(const Json& j, std::ostream& warn = std::cerr) {
  if (!j.is_object()) throw FormatError("state file: expected a JSON object");
  StateFile sf;
  sf.version = j.value("version", "1");
  const std::string kind = j.value("kind", "");
  if (kind == "pure")
    sf.kind = StateFileKind::Pure;
  else if (kind == "mixed")
    sf.kind = StateFileKind::Mixed;
  else
    throw FormatError("state file: kind must be \"pure\" or \"mixed\"");
  if (!j.contains("dims") || !j["dims"].contains("d_a"))
    throw FormatError("state file: missing dims.d_a");
  sf.d_a = j["dims"]["d_a"].get<std::size_t>();
  if (sf.d_a == 0) throw FormatError("state file: d_a must be positive");
  if (j["dims"].contains("d_b")) sf.d_b = j["dims"]["d_b"].get<std::size_t>();
  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
    throw FormatError("state file: missing or empty states");

  for (const Json& e : j["states"]) {
    if (sf.kind == StateFileKind::Pure) {
      ComplexVector v = vector_from_json(e);
      if (v.size() != sf.d_a) throw FormatError("state file: state length does not match d_a");
      const double err = std::abs(vec_norm(v) - 1.0);
      if (err > 1e-8) throw FormatError("state file: pure state is not normalized");
      if (err > 1e-10)
        warn << "mask-lab: warning: renormalizing a pure state off unit norm by " << err
             << "\n";
      sf.pure_states.push_back(PureState::normalized_from(v));
    } else {
      ComplexMatrix m = matrix_from_json(e);
      if (m.rows() != sf.d_a || m.cols() != sf.d_a)
        throw FormatError("state file: density matrix shape does not match d_a");
      try {
        sf.mixed_states.push_back(DensityMatrix(sf.d_a, hermitize(m)));
      } catch (const std::invalid_argument& ex) {
        throw FormatError(std::string("state file: invalid density matrix: ") + ex.what());
      }
    }
  }
  return sf;
}

inline StateFile load_state_file(const std::filesystem::path& path,
                                 std::ostream& warn = std::cerr) {
  return state_file_from_json(parse_json(read_text_file(path)), warn);
}

inline void save_state_file(const std::filesystem::path& path, const StateFile& sf) {
  write_json_atomic(path, state_file_to_json(sf));
}

// -- masker descriptors --------------------------------------------------------------

inline Json masker_to_json(const Masker& s, const Json& params = Json::object()) {
  Json j;
  j["kind"] = masker_kind_name(s.kind);
  j["d_a"] = s.d_a;
  j["d_b"] = s.d_b;
  j["params"] = params;
  j["matrix"] = matrix_to_json(s.matrix);
  if (s.basis_a) j["basis_a"] = matrix_to_json(*s.basis_a);
  if (s.basis_b) j["basis_b"] = matrix_to_json(*s.basis_b);
  return j;
}

inline Masker masker_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("masker: expected a JSON object");
  Masker s;
  try {
    s.kind = parse_masker_kind(j.value("kind", ""));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  if (!j.contains("d_a") || !j.contains("d_b") || !j.contains("matrix"))
    throw FormatError("masker: missing d_a, d_b or matrix");
  s.d_a = j["d_a"].get<std::size_t>();
  s.d_b = j["d_b"].get<std::size_t>();
  s.matrix = matrix_from_json(j["matrix"]);
  if (j.contains("basis_a")) s.basis_a = matrix_from_json(j["basis_a"]);
  if (j.contains("basis_b")) s.basis_b = matrix_from_json(j["basis_b"]);
  try {
    validate_masker(s);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("masker: ") + e.what());
  }
  return s;
}

inline Json masker_file_to_json(const Masker& s, const Json& params = Json::object()) {
  Json j;
  j["version"] = "1";
  j["masker"] = masker_to_json(s, params);
  return j;
}

inline Masker load_masker_file(const std::filesystem::path& path) {
  const Json j = parse_json(read_text_file(path));
  if (!j.is_object() || !j.contains("masker"))
    throw FormatError("masker file: missing \"masker\" object");
  return masker_from_json(j["masker"]);
}

// -- masking reports -------------------------------------------------------------------

inline Json report_to_json(const MaskingReport& report, const Masker& s,
                           const Json& masker_params = Json::object()) {
  Json j;
  j["version"] = "1";
  j["verdict"] = verdict_name(report.verdict);
  j["tolerance"] = report.tolerance;
  j["max_deviation"] = report.max_deviation;
  j["reference_marginal_a"] = matrix_to_json(report.reference_marginal_a.matrix());
  j["reference_marginal_b"] = matrix_to_json(report.reference_marginal_b.matrix());
  Json devs = Json::array();
  for (const StateDeviation& d : report.per_state_deviations) {
    Json e;
    e["index"] = d.index;
    e["dev_a"] = d.dev_a;
    e["dev_b"] = d.dev_b;
    devs.push_back(std::move(e));
  }
  j["per_state_deviations"] = devs;
  j["masker"] = masker_to_json(s, masker_params);
  return j;
}

struct LoadedReport {
  Verdict verdict = Verdict::NotMasked;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  ComplexMatrix reference_marginal_a;
  ComplexMatrix reference_marginal_b;
  std::vector<StateDeviation> per_state_deviations;
  Masker masker;
};

inline LoadedReport report_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("report: expected a JSON object");
  LoadedReport r;
  const std::string verdict = j.value("verdict", "");
  if (verdict == "Masked")
    r.verdict = Verdict::Masked;
  else if (verdict == "NotMasked")
    r.verdict = Verdict::NotMasked;
  else
    throw FormatError("report: verdict must be Masked or NotMasked");
  if (!j.contains("tolerance") || !j.contains("max_deviation"))
    throw FormatError("report: missing tolerance or max_deviation");
  r.tolerance = j["tolerance"].get<double>();
  r.max_deviation = j["max_deviation"].get<double>();
  r.reference_marginal_a = matrix_from_json(j.at("reference_marginal_a"));
  r.reference_marginal_b = matrix_from_json(j.at("reference_marginal_b"));
  for (const Json& e : j.at("per_state_deviations"))
    r.per_state_deviations.push_back(
        {e.at("index").get<std::size_t>(), e.at("dev_a").get<double>(),
         e.at("dev_b").get<double>()});
  r.masker = masker_from_json(j.at("masker"));
  return r;
}

inline LoadedReport load_report_file(const std::filesystem::path& path) {
  return report_from_json(parse_json(read_text_file(path)));
}

}  // namespace masklab
