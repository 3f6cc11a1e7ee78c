#include "nvamp/executor.hpp"

#include <omp.h>

#include <atomic>
#include <exception>
#include <sstream>

#include "json.hpp"
#include "nvamp/errors.hpp"
#include "nvamp/lang/checker.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

using lang::RunResult;

const TestTrace* TraceSet::find(const std::string& test) const {
  for (const auto& t : tests) {
    if (t.test == test) return &t;
  }
  return nullptr;
}

std::size_t TraceSet::record_count() const {
  std::size_t n = 0;
  for (const auto& t : tests) n += t.records.size();
  return n;
}

std::string suite_digest(const TestSuite& suite) {
  std::uint64_t h = fnv1a("suite");
  for (std::size_t i = 0; i < suite.files.size(); ++i) {
    h = fnv1a(suite.files[i].path, h);
    h = fnv1a(render_file(suite, i), h);
  }
  return hex64(h);
}

namespace {

void check_or_throw(const lang::Image& image, const std::string& what,
                    const std::set<std::string>& classes) {
  std::vector<std::string> problems;
  for (const auto* cls : image.class_order) {
    if (!classes.count(cls->name)) continue;
    for (const auto& d : lang::check_class(image, *cls)) {
      problems.push_back(d.cls + (d.method.empty() ? "" : "." + d.method) + ": " + d.message);
    }
  }
  if (!problems.empty()) throw Error(ErrorCode::kBuildError, what + ": " + join(problems, "; "));
}

std::set<std::string> class_names(const std::vector<lang::CompilationUnit>& units) {
  std::set<std::string> out;
  for (const auto& u : units) {
    for (const auto& c : u.classes) out.insert(c.name);
  }
  return out;
}

std::atomic<unsigned long> g_job_counter{0};

}  // namespace

std::shared_ptr<const lang::Image> build_program(const Program& program) {
  auto image = lang::link_image(program.shared_units());
  check_or_throw(*image, program.id, class_names(program.units));
  return image;
}

SuiteRun run_suite(const TestSuite& suite, int points_declared, const Program& program,
                   const EnvironmentPerturbation& env, const std::string& run_id,
                   const RunOptions& opts) {
  build_program(program);

  auto units = program.shared_units();
  std::vector<bool> has_tests(suite.files.size(), false);
  for (const auto& t : suite.tests) has_tests.at(t.file) = true;
  for (std::size_t i = 0; i < suite.files.size(); ++i) {
    if (has_tests[i]) units.push_back(std::make_shared<const lang::CompilationUnit>(to_unit(suite, i)));
  }
  auto image = lang::link_image(std::move(units));

  std::map<std::string, std::set<std::string>> broken;
  std::map<std::string, std::string> broken_reason;
  for (std::size_t i = 0; i < suite.files.size(); ++i) {
    if (!has_tests[i]) continue;
    const auto* cls = image->find_class(suite.files[i].class_name);
    std::vector<lang::Diagnostic> diags;
    broken[cls->name] = lang::broken_tests(*image, *cls, &diags);
    for (const auto& d : diags) {
      broken_reason.emplace(cls->name + "." + d.method, d.message);
    }
  }

  SuiteRun out;
  out.trace.program_id = program.id;
  out.trace.run_id = run_id;
  out.trace.environment = env.label();
  out.trace.suite_digest = suite_digest(suite);
  out.stats.tests_declared = static_cast<int>(suite.tests.size());
  out.stats.points_declared = points_declared;

  auto job_dir = opts.scratch / (run_id + "-" + program.id + "-" + env.label() + "-" +
                                 std::to_string(g_job_counter.fetch_add(1)));
  auto drop = [&](const std::string& test, const std::string& reason) {
    ++out.stats.dropped_nonexecutable;
    out.stats.dropped.push_back(test + ": " + reason);
  };

  for (const auto& t : suite.tests) {
    const std::string& cls = suite.files[t.file].class_name;
    if (broken[cls].count(t.name)) {
      auto r = broken_reason.find(cls + "." + t.name);
      drop(t.name, "build: " + (r == broken_reason.end() ? std::string("depends on a broken member")
                                                          : r->second));
      continue;
    }
    lang::HostEnvironment host;
    host.workdir = job_dir / t.name;
    host.visible_workdir = env.visible_workdir / t.name;
    host.vars = env.vars;
    host.locale = env.locale;
    host.timezone = env.timezone;
    std::error_code ec;
    std::filesystem::remove_all(host.workdir, ec);
    std::filesystem::create_directories(host.workdir, ec);
    if (ec) throw Error(ErrorCode::kExecutionError, "cannot create " + host.workdir.string());

    RunResult r;
    {
      lang::Interpreter interp(image, host, opts.timeout);
      r = interp.run_test(cls, t.name);
    }
    if (r.status == RunResult::Status::kTimeout) {
      drop(t.name, "timeout");
      continue;
    }
    if (r.status == RunResult::Status::kBroken) {
      drop(t.name, "build: " + r.failure);
      continue;
    }
    if (t.instrumented && !r.records.empty() && r.records.front().exception) {
      drop(t.name, "threw before the first observation: " + r.records.front().value);
      continue;
    }
    if (r.status == RunResult::Status::kFailed) out.stats.failed.push_back(t.name + ": " + r.failure);
    out.stats.tests_executed += r.test_invocations;
    out.stats.points_executed += static_cast<int>(r.records.size());
    out.coverage.insert(r.coverage.begin(), r.coverage.end());
    out.trace.tests.push_back(TestTrace{t.name, std::move(r.records)});
  }
  std::error_code ec;
  std::filesystem::remove_all(job_dir, ec);
  return out;
}

std::set<int> measure_coverage(const TestSuite& suite, const Program& program,
                               const RunOptions& opts) {
  if (suite.tests.empty()) {
    build_program(program);
    return {};
  }
  Program covered = with_coverage(program);
  return run_suite(suite, 0, covered, EnvironmentPerturbation{}, "coverage", opts).coverage;
}

SuiteRun LocalRunner::run(const Job& job, const RunOptions& opts) {
  return run_suite(*job.suite, job.points_declared, *job.program, job.env, job.run_id, opts);
}

std::vector<SuiteRun> run_jobs_serial(Runner& runner, const std::vector<Job>& jobs,
                                      const RunOptions& opts) {
  std::vector<SuiteRun> out;
  out.reserve(jobs.size());
  for (const auto& j : jobs) out.push_back(runner.run(j, opts));
  return out;
}

std::vector<SuiteRun> run_jobs_parallel(Runner& runner, const std::vector<Job>& jobs,
                                        const RunOptions& opts, int workers) {
  std::vector<SuiteRun> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  int threads = workers > 0 ? workers : omp_get_max_threads();
  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = runner.run(jobs[i], opts);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // report the failure the serial path would have hit first
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string format_trace(const TraceSet& trace) {
  std::string out;
  for (const auto& t : trace.tests) {
    for (const auto& r : t.records) {
      out += trace.run_id;
      out += '\t';
      out += t.test;
      out += '\t';
      out += r.point_id;
      out += '\t';
      out += r.value;
      out += '\n';
    }
  }
  return out;
}

TraceSet parse_trace(const std::string& text) {
  TraceSet trace;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        throw Error(ErrorCode::kTraceMismatch, "malformed trace line " + std::to_string(lineno));
      }
      f.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    f.push_back(line.substr(start));
    if (trace.run_id.empty()) trace.run_id = f[0];
    if (trace.tests.empty() || trace.tests.back().test != f[1]) trace.tests.push_back({f[1], {}});
    bool exc = f[2] == exception_point_id(f[1]);
    trace.tests.back().records.push_back(lang::ObsRecord{f[2], f[3], exc});
  }
  return trace;
}

std::string stats_json(const ExecStats& s) {
  nlohmann::ordered_json j;
  j["tests_declared"] = s.tests_declared;
  j["tests_executed"] = s.tests_executed;
  j["points_declared"] = s.points_declared;
  j["points_executed"] = s.points_executed;
  j["dropped_nonexecutable"] = s.dropped_nonexecutable;
  j["dropped"] = s.dropped;
  j["failed"] = s.failed;
  return j.dump(2) + "\n";
}

}  // namespace nvamp
