#pragma once

// Input-space amplification: single-step literal and statement
// transformations, assertion removal, and the stacked numeric baseline.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nvamp/test_ir.hpp"

namespace nvamp {

struct LiteralCounts {
  int s = 0;   // string literals
  int n = 0;   // numeric literals
  int b = 0;   // boolean literals
  int st = 0;  // statements

  int formula() const { return s * 3 + n * 4 + b + st * 2; }
  bool operator==(const LiteralCounts&) const = default;
};

enum class AmplificationKind { kFull, kTdr };

struct AmplifiedSuite {
  TestSuite suite;  // each stripped original followed by its generated tests
  LiteralCounts counts;
  int generated_count = 0;
  // numeric transformations not emitted because the result would leave the
  // literal's representable range
  int skipped_overflow = 0;
  int dropped_nonexecutable = 0;  // filled in by the executor
  AmplificationKind kind = AmplificationKind::kFull;
  int interaction_level = 0;
  std::uint64_t seed = 0;

  int originals() const {
    return static_cast<int>(suite.tests.size()) - generated_count;
  }
};

using LiteralVariant = std::pair<TransformationDescriptor, lang::Expr>;

/// 3 results for strings, 4 for numbers (minus overflowing ones), 1 for
/// booleans. Character choices come from a stream derived from (seed, slot).
std::vector<LiteralVariant> transform_literal(const LiteralSlot& slot,
                                              std::uint64_t seed,
                                              int* skipped = nullptr);

/// Applies one numeric step; false when the result is not representable.
bool apply_numeric(TransformKind kind, const lang::Expr& in, lang::Expr& out);

/// Remove and duplicate variants of every non-assertion statement.
std::vector<TestCase> transform_statements(const TestCase& test);

/// Removes assertions, hoisting their method-call arguments in place.
TestCase strip_assertions(const TestCase& test);

AmplifiedSuite amplify(const TestSuite& suite, std::uint64_t seed);
AmplifiedSuite tdr_amplify(const TestSuite& suite, int interaction_level);

/// JSON manifest of every test with its parent and transformation.
std::string manifest_json(const AmplifiedSuite& ats);

/// Writes the rendered suite under `dir/tests` and `dir/manifest.json`.
void write_ats(const AmplifiedSuite& ats, const std::filesystem::path& dir);

}  // namespace nvamp
