// Command-line front end: amplify, calibrate, detect, forge, report.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nvamp/amplifier.hpp"
#include "nvamp/errors.hpp"
#include "nvamp/flake_filter.hpp"
#include "nvamp/forge.hpp"
#include "nvamp/observer.hpp"
#include "nvamp/pipeline.hpp"
#include "nvamp/util.hpp"

namespace fs = std::filesystem;
using namespace nvamp;

namespace {

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kConfigError:
    case ErrorCode::kParseError:
    case ErrorCode::kUnsupportedConstruct:
      return 1;
    case ErrorCode::kBuildError:
      return 2;
    case ErrorCode::kOriginalSuiteRed:
      return 4;
    default:
      return 3;
  }
}

int workers_from_env() {
  const char* w = std::getenv("NVAMP_WORKERS");
  if (!w || !*w) return 0;
  try {
    int n = std::stoi(w);
    if (n < 0) throw std::invalid_argument("negative");
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfigError, std::string("NVAMP_WORKERS is not a count: ") + w);
  }
}

struct Flags {
  std::string config;
  std::string corpus;
  std::string out;
  std::uint64_t seed = 0;
  int runs = 30;
  int envs = 3;
  std::string modes;
  int tdr_level = 1;
  long timeout_ms = 10000;
  bool no_oracle = false;
  std::string kind;
  int budget = 20;
  std::string bundle;
};

std::vector<ObservationMode> parse_modes(const std::string& list) {
  std::vector<ObservationMode> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    std::string part = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!part.empty()) out.push_back(parse_mode(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

PipelineConfig build_config(const Flags& f, CLI::App& sub) {
  PipelineConfig cfg;
  if (!f.config.empty()) load_config_file(f.config, cfg);
  if (sub.count("--corpus")) cfg.corpus = f.corpus;
  if (sub.count("--out")) cfg.out = f.out;
  if (sub.count("--seed")) cfg.seed = f.seed;
  if (sub.count("--runs")) cfg.runs = f.runs;
  if (sub.count("--envs")) cfg.environments = f.envs;
  if (sub.count("--modes")) cfg.modes = parse_modes(f.modes);
  if (sub.count("--tdr-level")) cfg.tdr_level = f.tdr_level;
  if (sub.count("--timeout-ms")) cfg.timeout = std::chrono::milliseconds(f.timeout_ms);
  if (f.no_oracle) cfg.oracle = false;
  cfg.workers = workers_from_env();
  return cfg;
}

int cmd_amplify(const PipelineConfig& in) {
  PipelineConfig cfg = in;
  cfg.resolve();
  Fixture fx = load_fixture(cfg.corpus);
  AmplifiedSuite ats = amplify(fx.suite, cfg.require_seed());
  write_ats(ats, cfg.out / "ats" / "amplified");
  std::cout << fx.name << ": " << ats.originals() << " originals, " << ats.generated_count
            << " generated (s=" << ats.counts.s << " n=" << ats.counts.n << " b=" << ats.counts.b
            << " st=" << ats.counts.st << ", skipped " << ats.skipped_overflow << "), "
            << multiplier(static_cast<int>(ats.suite.tests.size()), ats.originals()) << "\n";
  if (std::count(cfg.modes.begin(), cfg.modes.end(), ObservationMode::kTdr)) {
    AmplifiedSuite tdr = tdr_amplify(fx.suite, cfg.tdr_level);
    write_ats(tdr, cfg.out / "ats" / "tdr");
    std::cout << fx.name << ": TDR level " << cfg.tdr_level << ", " << tdr.generated_count
              << " generated\n";
  }
  return 0;
}

int cmd_calibrate(const PipelineConfig& in) {
  PipelineConfig cfg = in;
  cfg.resolve();
  Fixture fx = load_fixture(cfg.corpus);
  RunOptions opts = cfg.run_options();
  AmplifiedSuite full = amplify(fx.suite, cfg.require_seed());
  AmplifiedSuite tdr;
  if (std::count(cfg.modes.begin(), cfg.modes.end(), ObservationMode::kTdr)) {
    tdr = tdr_amplify(fx.suite, cfg.tdr_level);
  }
  AccessorCatalog catalog = build_catalog(fx.original.units);
  CalibrationConfig cc;
  cc.runs_per_environment = cfg.runs;
  cc.environments = cfg.environments;
  LocalRunner runner;
  for (auto mode : cfg.modes) {
    InstrumentedSuite inst = instrument_suite(mode_suite(mode, full, tdr), catalog, mode);
    StablePointSet s = cfg.workers == 1
                           ? calibrate_serial(inst, fx.original, cc, runner, opts)
                           : calibrate_parallel(inst, fx.original, cc, runner, opts, cfg.workers);
    write_file_if_changed(cfg.out / "calibration" / mode_key(mode) / "calibration.json",
                          calibration_json(s, inst));
    std::cout << fx.name << " " << to_string(mode) << ": " << s.stable.size() << " stable ("
              << s.unexercised.size() << " unexercised), " << s.discarded.size() << " discarded\n";
    for (const auto& [id, ev] : s.discarded) {
      std::cout << "  discarded " << id << " (" << ev.first_run << " vs " << ev.other_run << ")\n";
    }
  }
  std::error_code ec;
  fs::remove_all(opts.scratch, ec);
  return 0;
}

int cmd_detect(const PipelineConfig& in) {
  PipelineConfig base = in;
  base.resolve();
  auto roots = fixture_roots(base.corpus);
  for (const auto& root : roots) {
    PipelineConfig cfg = base;
    cfg.corpus = root;
    if (roots.size() > 1 || root != base.corpus) cfg.out = base.out / root.filename();
    DetectResult r = detect(cfg);
    std::cout << render_summary(r.report_json);
  }
  return 0;
}

int cmd_forge(const Flags& f, const PipelineConfig& in) {
  PipelineConfig cfg = in;
  if (cfg.out.empty()) cfg.out = cfg.corpus;
  cfg.resolve();
  Fixture fx = load_fixture(cfg.corpus);
  RunOptions opts = cfg.run_options();
  SteroidKind kind = parse_steroid_kind(f.kind);
  ForgeResult res = synthesize(fx.original, fx.suite, kind, f.budget, cfg.require_seed(), opts,
                               cfg.workers);
  std::vector<const Program*> accepted;
  for (const auto& v : res.accepted) accepted.push_back(&v.patched);
  auto verdicts = oracle_label(fx.original, accepted, opts);
  write_variants(cfg.out, fx.original, res, verdicts);
  std::cout << fx.name << ": sampled " << res.sampled << ", accepted " << res.accepted.size()
            << ", rejected " << res.rejected_uncovered << " uncovered / " << res.rejected_build
            << " build / " << res.rejected_failing << " failing\n";
  for (std::size_t i = 0; i < res.accepted.size(); ++i) {
    std::cout << "  " << res.accepted[i].id << (res.accepted[i].identity ? " (identity)" : "")
              << ": " << (verdicts[i].diverse ? "diverse" : "equivalent") << "\n";
  }
  std::error_code ec;
  fs::remove_all(opts.scratch, ec);
  return 0;
}

int cmd_report(const Flags& f) {
  fs::path dir = f.bundle;
  if (fs::is_regular_file(dir / "report" / "report.json")) dir /= "report";
  if (!fs::is_regular_file(dir / "report.json")) {
    throw Error(ErrorCode::kConfigError, "no report.json in " + dir.string());
  }
  render_report(dir);
  std::cout << read_file(dir / "summary.txt");
  return 0;
}

void pipeline_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override its keys");
  sub->add_option("--corpus", f.corpus, "fixture root, or a directory of fixtures");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--seed", f.seed, "amplification seed (required)");
  sub->add_option("--runs", f.runs, "calibration runs per environment");
  sub->add_option("--envs", f.envs, "calibration environments");
  sub->add_option("--modes", f.modes, "comma list of FULL,INPUT_ONLY,OBSERVATION_ONLY,TDR");
  sub->add_option("--tdr-level", f.tdr_level, "TDR interaction level");
  sub->add_option("--timeout-ms", f.timeout_ms, "per-test timeout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nvamp: find observable behavior differences between program variants"};
  app.require_subcommand(1);
  Flags f;
  auto* amp = app.add_subcommand("amplify", "write the amplified test suite");
  pipeline_flags(amp, f);
  auto* cal = app.add_subcommand("calibrate", "find naturally varying observation points");
  pipeline_flags(cal, f);
  auto* det = app.add_subcommand("detect", "run the full pipeline and write the report bundle");
  pipeline_flags(det, f);
  det->add_flag("--no-oracle", f.no_oracle, "skip brute-force ground truth");
  auto* frg = app.add_subcommand("forge", "synthesize sosie variants");
  pipeline_flags(frg, f);
  frg->add_option("--kind", f.kind, "add, delete or replace")->required();
  frg->add_option("--budget", f.budget, "candidates to sample");
  auto* rep = app.add_subcommand("report", "re-render summary and CSV tables of a bundle");
  rep->add_option("--bundle", f.bundle, "report directory or detect output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the configuration exit code
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    if (*rep) return cmd_report(f);
    CLI::App* sub = app.get_subcommands().front();
    PipelineConfig cfg = build_config(f, *sub);
    if (*amp) {
      if (!amp->count("--modes")) cfg.modes = {ObservationMode::kFull};
      return cmd_amplify(cfg);
    }
    if (*cal) {
      if (!cal->count("--modes") && f.config.empty()) cfg.modes = {ObservationMode::kFull};
      return cmd_calibrate(cfg);
    }
    if (*det) return cmd_detect(cfg);
    if (*frg) return cmd_forge(f, cfg);
  } catch (const Error& e) {
    std::cerr << "nvamp: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "nvamp: internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
