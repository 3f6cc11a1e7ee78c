#pragma once

// Sosie synthesis: single-statement Add / Delete / Replace transplants
// drawn from the program itself, kept only when the modified statement is
// covered and the original suite still passes. Also the brute-force
// oracle that labels variants as observably different from the original.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvamp/executor.hpp"
#include "nvamp/program.hpp"
#include "nvamp/test_ir.hpp"

namespace nvamp {

enum class SteroidKind { kAdd, kDelete, kReplace };
std::string_view to_string(SteroidKind k);  // "add", "delete", "replace"
SteroidKind parse_steroid_kind(const std::string& s);  // throws CONFIG_ERROR

struct TransplantCandidate {
  int transplant = 0;  // statement id
  std::map<std::string, std::string> bindings;  // transplant name -> name at point
  bool identity = false;  // bound transplant equals the statement at the point
};

/// Statements whose free variables can all be bound, by exact declared
/// type, to names in scope at `point`. A same-named variable is preferred,
/// then the innermost compatible one. Ordered by statement id.
std::vector<TransplantCandidate> enumerate_transplants(const Program& program, int point);

struct SosieCheck {
  bool covered = false;
  bool builds = false;
  bool passes = false;
  bool is_sosie = false;
  std::string detail;
};

struct VariantDescriptor {
  std::string id;
  SteroidKind kind = SteroidKind::kDelete;
  int point = 0;
  std::optional<int> transplant;
  std::map<std::string, std::string> bindings;
  bool identity = false;
  Program patched;
  SosieCheck check;
};

/// Applies one transformation; `candidate` is ignored for DELETE.
Program apply_steroid(const Program& program, SteroidKind kind, int point,
                      const TransplantCandidate* candidate, const std::string& variant_id);

struct ForgeResult {
  std::vector<VariantDescriptor> accepted;  // sample order
  int sampled = 0;
  int rejected_uncovered = 0;
  int rejected_build = 0;
  int rejected_failing = 0;
};

/// Samples up to `budget` candidates with a stream derived from `seed` and
/// checks each against the original suite. workers == 1 runs serially.
ForgeResult synthesize(const Program& program, const TestSuite& suite, SteroidKind kind,
                       int budget, std::uint64_t seed, const RunOptions& opts, int workers);

/// Runs `suite` (uninstrumented) on `program`: every test must build, run
/// and pass.
bool suite_passes(const TestSuite& suite, const Program& program, const RunOptions& opts,
                  std::string* detail = nullptr);

// Brute-force oracle inputs. Longs use the int grid.
const std::vector<std::int32_t>& oracle_int_grid();
const std::vector<double>& oracle_double_grid();
const std::vector<std::string>& oracle_string_grid();

struct OracleVerdict {
  std::string variant;
  bool diverse = false;
  int probes = 0;
  std::string witness_probe;
  std::string witness_original;
  std::string witness_variant;
};

/// Calls every public method of every class over the grid (constructor
/// arguments too) and compares return values, thrown exceptions and the
/// receiver's accessors afterwards. Probes whose result varies between two
/// runs of the original are ignored.
std::vector<OracleVerdict> oracle_label(const Program& original,
                                        const std::vector<const Program*>& variants,
                                        const RunOptions& opts);

std::string variant_json(const VariantDescriptor& v, const Program& original);
std::string ground_truth_json(const std::vector<OracleVerdict>& verdicts);

/// Writes `<root>/variants/<id>/src` and `variant.json` for each accepted
/// variant, then `<root>/ground_truth.json`.
void write_variants(const std::filesystem::path& root, const Program& original,
                    const ForgeResult& result, const std::vector<OracleVerdict>& verdicts);

}  // namespace nvamp
