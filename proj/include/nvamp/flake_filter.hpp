#pragma once

// Calibration: repeated runs of the instrumented suite on the original
// program, under several environment perturbations, to find observation
// points whose values vary without any change to the program.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nvamp/executor.hpp"
#include "nvamp/observer.hpp"

namespace nvamp {

struct CalibrationConfig {
  int runs_per_environment = 30;
  int environments = 3;
  EnvironmentPerturbation base;

  /// Throws CONFIG_ERROR unless runs >= 2 and environments >= 1.
  void validate() const;
};

struct DiscardEvidence {
  std::string first_run;
  std::string other_run;
  std::string first_values;  // value sequence, " | " separated, "<absent>" when absent
  std::string other_values;
};

struct StablePointSet {
  std::set<std::string> stable;
  std::map<std::string, DiscardEvidence> discarded;
  // stable only by default: no run ever logged them
  std::set<std::string> unexercised;
  std::map<std::string, std::set<std::string>> environments;  // point -> env labels
  ExecStats reference_stats;  // first run of the unperturbed environment

  bool is_stable(const std::string& point_id) const { return stable.count(point_id) > 0; }
};

/// Index 0 returns `base` unchanged. Other indices move the visible working
/// directory and set HOME, TMPDIR, LANG, LC_ALL, TZ and NVAMP_ENV_INDEX.
EnvironmentPerturbation perturb_environment(const EnvironmentPerturbation& base, int index);

/// Classifies every declared point from the traces of repeated runs of one
/// suite on one program. Pure; `runs` are in run order.
StablePointSet classify_points(const std::vector<std::string>& declared,
                               const std::vector<TraceSet>& runs);

/// Reference path: every run in sequence.
StablePointSet calibrate_serial(const InstrumentedSuite& ats, const Program& original,
                                const CalibrationConfig& cfg, Runner& runner,
                                const RunOptions& opts);
/// Environments in parallel, runs within one environment in sequence.
StablePointSet calibrate_parallel(const InstrumentedSuite& ats, const Program& original,
                                  const CalibrationConfig& cfg, Runner& runner,
                                  const RunOptions& opts, int workers);

std::string calibration_json(const StablePointSet& set, const InstrumentedSuite& ats);

}  // namespace nvamp
