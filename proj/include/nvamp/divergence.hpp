#pragma once

// Trace comparison across program variants over stable observation points.

#include <map>
#include <string>
#include <vector>

#include "nvamp/executor.hpp"
#include "nvamp/flake_filter.hpp"
#include "nvamp/observer.hpp"

namespace nvamp {

enum class Verdict { kNvpDiverse, kNotDetected };
std::string_view to_string(Verdict v);

struct DivergingPoint {
  std::string point_id;
  std::string value_a;  // value sequence, " | " separated, "<absent>" when not logged
  std::string value_b;
  bool operator==(const DivergingPoint&) const = default;
};

struct DivergenceReport {
  std::string program_a;
  std::string program_b;
  std::vector<DivergingPoint> diverging;  // sorted by point id
  int count = 0;
  Verdict verdict = Verdict::kNotDetected;
  ObservationMode mode = ObservationMode::kFull;
  std::vector<std::string> environments;
};

/// Point-by-point comparison of value sequences, absence included, over the
/// stable points only. Throws TRACE_MISMATCH when the traces come from
/// different suites or environments.
DivergenceReport compare(const TraceSet& a, const TraceSet& b, const StablePointSet& stable,
                         ObservationMode mode = ObservationMode::kFull);

/// One report per environment folded into one: a point diverges if it does
/// in any environment (the first environment's values are kept).
DivergenceReport combine_environments(const std::vector<DivergenceReport>& per_env);

/// Arithmetic mean of the counts. Throws EMPTY_SET on no reports.
double mean_divergence(const std::vector<DivergenceReport>& reports);

struct ModeTraces {
  TraceSet a;
  TraceSet b;
  const StablePointSet* stable = nullptr;
};

/// Compares a pair under each suite variant given.
std::map<ObservationMode, DivergenceReport> ablate(
    const std::map<ObservationMode, ModeTraces>& inputs);

}  // namespace nvamp
