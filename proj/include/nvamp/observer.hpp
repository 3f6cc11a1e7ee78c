#pragma once

// Observation-space amplification: discovers state-reading call sites for
// the objects a test creates and instruments tests to log their values.

#include <map>
#include <string>
#include <vector>

#include "nvamp/lang/ast.hpp"
#include "nvamp/test_ir.hpp"

namespace nvamp {

enum class PointSource {
  kGetter,
  kPublicField,
  kDebugRender,
  kOriginalAssertionCall,
  kExceptionMessage,
};
std::string_view to_string(PointSource s);

struct ObservationPoint {
  std::string point_id;
  PointSource source = PointSource::kGetter;
  std::string test;
  std::string anchor;  // statement ordinal, "<ordinal>/body" or "*"
  std::string receiver;
  std::string accessor;
  int occurrence = 0;

  bool operator==(const ObservationPoint&) const = default;
};

struct TypeAccessors {
  std::vector<std::string> getters;  // method names, sorted
  std::vector<std::string> fields;   // sorted
  bool debug_render = false;

  bool empty() const { return getters.empty() && fields.empty() && !debug_render; }
};

struct AccessorCatalog {
  std::map<std::string, TypeAccessors> types;
};

/// No-argument, non-static, public `get*` with a result, or `is*` returning
/// boolean.
bool is_accessor(const lang::Method& m);

AccessorCatalog build_catalog(const std::vector<lang::CompilationUnit>& program);

std::vector<ObservationPoint> discover_points(const TestCase& test,
                                              const AccessorCatalog& catalog);

/// Inserts logging calls for `points` and marks the test as guarded.
/// Idempotent. Throws INSTRUMENTATION_ERROR when a receiver is not in scope
/// at its anchor.
TestCase instrument(const TestCase& test, const std::vector<ObservationPoint>& points);

enum class ObservationMode { kFull, kInputOnly, kTdr, kObservationOnly };
std::string_view to_string(ObservationMode m);
/// Lower-case directory name ("full", "input_only", ...).
std::string mode_key(ObservationMode m);

/// Keeps the points a mode observes: everything for FULL and
/// OBSERVATION_ONLY, assertion-derived calls plus the exception guard
/// otherwise.
std::vector<ObservationPoint> filter_points(const std::vector<ObservationPoint>& points,
                                            ObservationMode mode);

struct InstrumentedSuite {
  TestSuite suite;
  std::vector<ObservationPoint> points;  // test order, then anchor order
  ObservationMode mode = ObservationMode::kFull;
};

InstrumentedSuite instrument_suite(const TestSuite& suite, const AccessorCatalog& catalog,
                                   ObservationMode mode);

}  // namespace nvamp
