// mask-lab: build maskers, verify masking of state sets, run the named
// demonstrations and sample from maximal maskable families. All file formats
// are JSON with complex entries encoded as [re, im].

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "masklab/demos.hpp"
#include "masklab/io.hpp"
#include "masklab/masklab.hpp"

namespace {

using namespace masklab;

constexpr int kExitMasked = 0;
constexpr int kExitNotMasked = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct BuildOptions {
  std::string kind;
  std::size_t d = 2;
  std::optional<std::uint64_t> seed;
  std::string states_path;
  std::string out;
};

int run_build(const BuildOptions& opt) {
  Json params;
  if (opt.seed) params["seed"] = *opt.seed;

  Masker masker;
  const MaskerKind kind = parse_masker_kind(opt.kind);
  const ComplexMatrix id = ComplexMatrix::identity(opt.d);
  const ComplexMatrix basis_a = opt.seed ? random_unitary(opt.d, *opt.seed) : id;
  const ComplexMatrix basis_b = opt.seed ? random_unitary(opt.d, *opt.seed + 1) : id;
  switch (kind) {
    case MaskerKind::Sfn:
      masker = build_s_fn(basis_a, opt.d);
      break;
    case MaskerKind::Ssharp:
      masker = build_s_sharp(basis_a, basis_b);
      break;
    case MaskerKind::Sdiamond:
      masker = build_s_diamond(basis_a, basis_b);
      break;
    case MaskerKind::Multiparty:
      masker = multiparty_masker(opt.d);
      params["n"] = opt.d;
      break;
    case MaskerKind::Injection: {
      if (opt.states_path.empty())
        throw std::invalid_argument("build injection: --states is required");
      const StateFile sf = load_state_file(opt.states_path);
      if (sf.kind != StateFileKind::Pure)
        throw FormatError("build injection: --states must contain pure states");
      masker = build_injection_masker(sf.pure_states);
      params["states"] = opt.states_path;
      break;
    }
    case MaskerKind::Remark24:
      masker = build_remark24_operator();
      break;
    case MaskerKind::Custom:
      throw std::invalid_argument("build: kind must name a constructor, not custom");
  }
  params["d"] = masker.d_a;
  write_json_atomic(opt.out, masker_file_to_json(masker, params));
  std::cout << "built " << masker_kind_name(masker.kind) << " masker (d_a=" << masker.d_a
            << ", d_b=" << masker.d_b << ") -> " << opt.out << "\n";
  return kExitMasked;
}

struct VerifyOptions {
  std::string masker_path;
  std::string states_path;
  double tol = 1e-9;
  std::string out;
};

int run_verify(const VerifyOptions& opt) {
  const Masker masker = load_masker_file(opt.masker_path);
  const StateFile sf = load_state_file(opt.states_path);
  MaskingReport report =
      sf.kind == StateFileKind::Pure
          ? verify_masking_pure(masker, sf.pure_states, opt.tol)
          : verify_masking_mixed(masker, sf.mixed_states, opt.tol);
  if (!opt.out.empty()) write_json_atomic(opt.out, report_to_json(report, masker));
  std::cout << verdict_name(report.verdict) << " (max deviation "
            << report.max_deviation << ", tolerance " << report.tolerance << ")\n";
  return report.verdict == Verdict::Masked ? kExitMasked : kExitNotMasked;
}

int run_demo_cmd(const std::string& name, const std::string& out) {
  const DemoResult result = run_demo(name);
  if (!out.empty()) {
    Json j;
    j["demo"] = result.name;
    Json checks = Json::array();
    for (const DemoCheck& c : result.checks) {
      Json e;
      e["name"] = c.name;
      e["pass"] = c.pass;
      e["detail"] = c.detail;
      checks.push_back(std::move(e));
    }
    j["assertions"] = checks;
    j["passed"] = result.passed();
    write_json_atomic(out, j);
  }
  std::size_t failed = 0;
  for (const DemoCheck& c : result.checks)
    if (!c.pass) ++failed;
  if (failed == 0) {
    std::cout << "PASS " << result.name << " (" << result.checks.size() << " assertions)\n";
    return kExitMasked;
  }
  std::cout << "FAIL " << result.name << " (" << failed << "/" << result.checks.size()
            << " assertions failed)\n";
  return kExitNotMasked;
}

struct SampleOptions {
  std::string set;
  std::vector<double> params;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleOptions& opt) {
  if (opt.params.empty()) throw std::invalid_argument("sample: --params is required");
  if (opt.count == 0) throw std::invalid_argument("sample: --count must be positive");
  const std::size_t d = opt.params.size();
  const ComplexMatrix basis = ComplexMatrix::identity(d);
  Rng rng(opt.seed);

  StateFile sf;
  sf.d_a = d;
  if (opt.set == "q_r") {
    const AmplitudeVector r(opt.params);
    sf.kind = StateFileKind::Pure;
    for (std::size_t k = 0; k < opt.count; ++k)
      sf.pure_states.push_back(sample_q_r(r, basis, rng));
  } else if (opt.set == "q_p") {
    const ProbabilityVector p(opt.params);
    sf.kind = StateFileKind::Mixed;
    for (std::size_t k = 0; k < opt.count; ++k)
      sf.mixed_states.push_back(sample_q_p(p, basis, rng));
  } else if (opt.set == "q_q") {
    const ProbabilityVector q(opt.params);
    sf.kind = StateFileKind::Mixed;
    for (std::size_t k = 0; k < opt.count; ++k) sf.mixed_states.push_back(sample_q_q(q, rng));
  } else {
    throw std::invalid_argument("sample: set must be one of q_r, q_p, q_q");
  }
  save_state_file(opt.out, sf);
  std::cout << "wrote " << opt.count << " " << opt.set << " sample(s) -> " << opt.out
            << "\n";
  return kExitMasked;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mask-lab: constructions and checks for quantum information masking"};
  app.require_subcommand(1);

  BuildOptions build_opt;
  CLI::App* build = app.add_subcommand("build", "construct a masker and write it as JSON");
  build->add_option("kind", build_opt.kind,
                    "one of: sfn, sharp, diamond, multiparty, injection, remark24")
      ->required();
  build->add_option("--d", build_opt.d, "input dimension (n for multiparty)");
  build->add_option("--seed", build_opt.seed, "seed for random generating bases");
  build->add_option("--states", build_opt.states_path,
                    "pure StateFile with the inputs (injection kind)");
  build->add_option("--out", build_opt.out, "output path")->required();

  VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand("verify", "check whether a masker masks a state set");
  verify->add_option("--masker", verify_opt.masker_path, "masker JSON file")->required();
  verify->add_option("--states", verify_opt.states_path, "StateFile to check")->required();
  verify->add_option("--tol", verify_opt.tol, "masking tolerance (default 1e-9)");
  verify->add_option("--out", verify_opt.out, "report output path");

  std::string demo_name, demo_out;
  CLI::App* demo = app.add_subcommand("demo", "run one named demonstration");
  demo->add_option("name", demo_name, "demo name (see list below)")->required();
  demo->add_option("--out", demo_out, "assertion report output path");
  {
    std::string names;
    for (const std::string& n : masklab::demo_names()) names += n + " ";
    demo->footer("available demos: " + names);
  }

  SampleOptions sample_opt;
  CLI::App* sample = app.add_subcommand("sample", "draw states from a maskable family");
  sample->add_option("set", sample_opt.set, "one of: q_r, q_p, q_q")->required();
  sample->add_option("--params", sample_opt.params,
                     "amplitude vector (q_r) or probability vector (q_p, q_q)")
      ->required()
      ->delimiter(',');
  sample->add_option("--count", sample_opt.count, "number of samples");
  sample->add_option("--seed", sample_opt.seed, "RNG seed");
  sample->add_option("--out", sample_opt.out, "output StateFile path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (build->parsed()) return run_build(build_opt);
    if (verify->parsed()) return run_verify(verify_opt);
    if (demo->parsed()) return run_demo_cmd(demo_name, demo_out);
    if (sample->parsed()) return run_sample(sample_opt);
  } catch (const masklab::IoError& e) {
    std::cerr << "mask-lab: io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "mask-lab: error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
