#pragma once

// End-to-end orchestration over one fixture: amplify, instrument,
// calibrate, run every program, compare, report.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nvamp/amplifier.hpp"
#include "nvamp/divergence.hpp"
#include "nvamp/executor.hpp"
#include "nvamp/flake_filter.hpp"
#include "nvamp/observer.hpp"
#include "nvamp/program.hpp"

namespace nvamp {

struct PipelineConfig {
  std::filesystem::path corpus;  // fixture root: src/, tests/, variants/<id>/src/
  std::optional<std::uint64_t> seed;
  int runs = 30;
  int environments = 3;
  std::vector<ObservationMode> modes = {ObservationMode::kFull, ObservationMode::kInputOnly,
                                        ObservationMode::kObservationOnly, ObservationMode::kTdr};
  int tdr_level = 1;
  std::chrono::milliseconds timeout{10000};
  std::filesystem::path out;
  int workers = 0;  // 0: OpenMP default
  bool oracle = true;

  /// Throws CONFIG_ERROR; makes paths absolute.
  void resolve();
  std::uint64_t require_seed() const;
  RunOptions run_options() const;
};

/// Reads the documented keys (corpus, seed, runs, envs, modes, tdr_level,
/// timeout_ms, out, oracle) from a JSON file into `cfg`. Throws CONFIG_ERROR.
void load_config_file(const std::filesystem::path& file, PipelineConfig& cfg);
ObservationMode parse_mode(const std::string& s);

struct Fixture {
  std::string name;
  Program original;
  TestSuite suite;
  std::vector<Program> variants;  // sorted by id
};

/// Throws CONFIG_ERROR on a malformed layout.
Fixture load_fixture(const std::filesystem::path& root);
/// A fixture root itself, or every immediate subdirectory holding one.
std::vector<std::filesystem::path> fixture_roots(const std::filesystem::path& corpus);

/// Suite observed in a mode, before instrumentation.
TestSuite mode_suite(ObservationMode mode, const AmplifiedSuite& full, const AmplifiedSuite& tdr);

/// Stage results keyed by content; a present key is reused as is.
class StageCache {
 public:
  explicit StageCache(std::filesystem::path root) : root_(std::move(root)) {}
  std::optional<std::string> load(const std::string& key, const std::string& name) const;
  void store(const std::string& key, const std::string& name, const std::string& content) const;
  void seal(const std::string& key) const;
  bool sealed(const std::string& key) const;

 private:
  std::filesystem::path root_;
};

StablePointSet stable_from_json(const std::string& text);

struct DetectResult {
  std::string report_json;
  int exit_code = 0;
};

/// Runs the whole pipeline for one fixture and writes `<out>/report/`
/// (report.json, summary.txt, table2.csv, table3.csv, pairs.csv) and the
/// rendered suites under `<out>/ats/`. Throws CONFIG_ERROR or
/// ORIGINAL_SUITE_RED.
DetectResult detect(const PipelineConfig& cfg);

/// Amplification multiplier with one decimal, e.g. "×9.3".
std::string multiplier(int total, int originals);

/// Re-renders summary.txt and the CSV tables from `report.json` in `dir`.
void render_report(const std::filesystem::path& dir);
std::string render_summary(const std::string& report_json);
std::string render_table2_csv(const std::string& report_json);
std::string render_table3_csv(const std::string& report_json);
std::string render_pairs_csv(const std::string& report_json);

/// Validates against the shipped report schema; returns the problems found.
std::vector<std::string> validate_report(const std::string& report_json);

}  // namespace nvamp
