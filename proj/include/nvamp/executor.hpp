#pragma once

// Runs test suites against programs, one fresh interpreter and working
// directory per test, and collects traces, statistics and coverage.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "nvamp/lang/interpreter.hpp"
#include "nvamp/program.hpp"
#include "nvamp/test_ir.hpp"

namespace nvamp {

/// Host-side conditions of a run. Index 0 is the unperturbed environment.
struct EnvironmentPerturbation {
  int index = 0;
  std::filesystem::path visible_workdir = "/work";
  std::map<std::string, std::string> vars;
  std::string locale = "C.UTF-8";
  std::string timezone = "UTC";

  std::string label() const { return "env" + std::to_string(index); }
  bool operator==(const EnvironmentPerturbation&) const = default;
};

struct TestTrace {
  std::string test;
  std::vector<lang::ObsRecord> records;  // execution order
};

struct TraceSet {
  std::string program_id;
  std::string run_id;
  std::string environment;
  std::string suite_digest;
  std::vector<TestTrace> tests;  // suite order; dropped tests are absent

  const TestTrace* find(const std::string& test) const;
  std::size_t record_count() const;
};

struct ExecStats {
  int tests_declared = 0;
  int tests_executed = 0;  // dynamic @Test invocations, nested ones included
  int points_declared = 0;
  int points_executed = 0;
  int dropped_nonexecutable = 0;
  std::vector<std::string> dropped;  // with the reason after ": "
  std::vector<std::string> failed;   // assertion failures and escaping exceptions
};

struct SuiteRun {
  TraceSet trace;
  ExecStats stats;
  std::set<int> coverage;  // only when the program carries coverage hits
};

struct RunOptions {
  std::chrono::milliseconds timeout{10000};
  // physical working directories are created below this root
  std::filesystem::path scratch = std::filesystem::temp_directory_path() / "nvamp-scratch";
};

/// Content key of a suite's rendered sources.
std::string suite_digest(const TestSuite& suite);

/// Links the program alone and runs the static check on it. Throws
/// BUILD_ERROR listing the diagnostics.
std::shared_ptr<const lang::Image> build_program(const Program& program);

/// One job: a suite against a program in one environment. Tests run in
/// suite order. Throws BUILD_ERROR when the program itself does not build.
SuiteRun run_suite(const TestSuite& suite, int points_declared, const Program& program,
                   const EnvironmentPerturbation& env, const std::string& run_id,
                   const RunOptions& opts);

/// Statement ids of `program` executed by at least one test of `suite`.
std::set<int> measure_coverage(const TestSuite& suite, const Program& program,
                               const RunOptions& opts);

struct Job {
  const TestSuite* suite = nullptr;
  int points_declared = 0;
  const Program* program = nullptr;
  EnvironmentPerturbation env;
  std::string run_id;
};

/// Seam for executing jobs elsewhere (other hosts, containers).
class Runner {
 public:
  virtual ~Runner() = default;
  virtual SuiteRun run(const Job& job, const RunOptions& opts) = 0;
};

class LocalRunner : public Runner {
 public:
  SuiteRun run(const Job& job, const RunOptions& opts) override;
};

/// Reference path: jobs one after another.
std::vector<SuiteRun> run_jobs_serial(Runner& runner, const std::vector<Job>& jobs,
                                      const RunOptions& opts);
/// Jobs spread over `workers` OpenMP threads; results in job order and
/// identical to the serial path. workers <= 0 uses the OpenMP default.
std::vector<SuiteRun> run_jobs_parallel(Runner& runner, const std::vector<Job>& jobs,
                                        const RunOptions& opts, int workers);

/// `run_id \t test \t point_id \t value` lines, in execution order.
std::string format_trace(const TraceSet& trace);
TraceSet parse_trace(const std::string& text);
std::string stats_json(const ExecStats& stats);

}  // namespace nvamp
