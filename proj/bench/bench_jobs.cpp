// Serial reference path against the OpenMP job kernels, on the corpus.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <unistd.h>

#include "nvamp/amplifier.hpp"
#include "nvamp/executor.hpp"
#include "nvamp/flake_filter.hpp"
#include "nvamp/observer.hpp"
#include "nvamp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace nvamp;

namespace {

// Every program of every fixture against that fixture's FULL suite.
struct Workload {
  std::vector<Fixture> fixtures;
  std::vector<InstrumentedSuite> suites;
  std::vector<Job> jobs;
  RunOptions opts;

  Workload() {
    opts.scratch = fs::temp_directory_path() / ("nvamp-bench-" + std::to_string(::getpid()));
    for (const auto& root : fixture_roots(NVAMP_CORPUS_DIR)) fixtures.push_back(load_fixture(root));
    for (const auto& fx : fixtures) {
      suites.push_back(instrument_suite(amplify(fx.suite, 42).suite,
                                        build_catalog(fx.original.units), ObservationMode::kFull));
    }
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
      std::vector<const Program*> programs{&fixtures[i].original};
      for (const auto& v : fixtures[i].variants) programs.push_back(&v);
      for (const Program* p : programs) {
        Job j;
        j.suite = &suites[i].suite;
        j.points_declared = static_cast<int>(suites[i].points.size());
        j.program = p;
        j.run_id = "bench";
        jobs.push_back(j);
      }
    }
  }
  ~Workload() {
    std::error_code ec;
    fs::remove_all(opts.scratch, ec);
  }
};

Workload& workload() {
  static Workload w;
  return w;
}

void BM_JobsSerial(benchmark::State& state) {
  Workload& w = workload();
  LocalRunner runner;
  for (auto _ : state) benchmark::DoNotOptimize(run_jobs_serial(runner, w.jobs, w.opts));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.jobs.size()));
}

void BM_JobsParallel(benchmark::State& state) {
  Workload& w = workload();
  LocalRunner runner;
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_jobs_parallel(runner, w.jobs, w.opts, workers));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.jobs.size()));
}

CalibrationConfig small_calibration() {
  CalibrationConfig cc;
  cc.runs_per_environment = 5;
  return cc;
}

void BM_CalibrateSerial(benchmark::State& state) {
  Workload& w = workload();
  LocalRunner runner;
  for (auto _ : state) {
    for (std::size_t i = 0; i < w.fixtures.size(); ++i) {
      benchmark::DoNotOptimize(
          calibrate_serial(w.suites[i], w.fixtures[i].original, small_calibration(), runner, w.opts));
    }
  }
}

void BM_CalibrateParallel(benchmark::State& state) {
  Workload& w = workload();
  LocalRunner runner;
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    for (std::size_t i = 0; i < w.fixtures.size(); ++i) {
      benchmark::DoNotOptimize(calibrate_parallel(w.suites[i], w.fixtures[i].original,
                                                  small_calibration(), runner, w.opts, workers));
    }
  }
}

}  // namespace

BENCHMARK(BM_JobsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JobsParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrateParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
