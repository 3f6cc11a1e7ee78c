#include <gtest/gtest.h>

#include "json.hpp"
#include "nvamp/amplifier.hpp"
#include "nvamp/flake_filter.hpp"
#include "nvamp/observer.hpp"
#include "support.hpp"

using namespace nvamp;
using nvamp::testing::code_of;
using nvamp::testing::options_in;
using nvamp::testing::program_of;
using nvamp::testing::suite_of;
using nvamp::testing::TempDir;

namespace {

TraceSet run_of(const std::string& id, const std::string& env,
                std::vector<std::pair<std::string, std::string>> records) {
  TraceSet t;
  t.run_id = id;
  t.environment = env;
  TestTrace tt{"t", {}};
  for (auto& [p, v] : records) tt.records.push_back({p, v, false});
  t.tests.push_back(tt);
  return t;
}

const char* kProbe = R"(public class Probe {
  private int fixed = 7;

  public int getFixed() {
    return fixed;
  }

  public long getStamp() {
    return System.nanoTime();
  }

  public int getRoll() {
    return System.randomInt();
  }

  public String getDir() {
    return System.cwd();
  }
}
)";

const char* kProbeTest = R"(public class ProbeTest {
  @Test
  public void t() {
    Probe p = new Probe();
  }
}
)";

InstrumentedSuite probe_suite(const Program& p) {
  return instrument_suite(suite_of("ProbeTest.mj", kProbeTest), build_catalog(p.units),
                          ObservationMode::kFull);
}

std::string point(const std::string& accessor) { return "t@0:p." + accessor + "()#0"; }

}  // namespace

TEST(ClassifyPoints, IdenticalRunsAreStable) {
  std::vector<TraceSet> runs{run_of("r0", "env0", {{"a", "1"}, {"b", "x"}}),
                             run_of("r1", "env0", {{"a", "1"}, {"b", "x"}})};
  StablePointSet s = classify_points({"a", "b", "c"}, runs);
  EXPECT_EQ(s.stable, (std::set<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(s.discarded.empty());
  EXPECT_EQ(s.unexercised, (std::set<std::string>{"c"}));
}

TEST(ClassifyPoints, AnyDifferenceDiscardsWithEvidence) {
  std::vector<TraceSet> runs{run_of("r0", "env0", {{"a", "1"}, {"b", "x"}}),
                             run_of("r1", "env0", {{"a", "1"}, {"b", "x"}}),
                             run_of("r2", "env1", {{"a", "2"}})};
  StablePointSet s = classify_points({"a", "b"}, runs);
  EXPECT_TRUE(s.stable.empty());
  ASSERT_EQ(s.discarded.size(), 2u);
  EXPECT_EQ(s.discarded.at("a").first_run, "r0");
  EXPECT_EQ(s.discarded.at("a").other_run, "r2");
  EXPECT_EQ(s.discarded.at("a").first_values, "1");
  EXPECT_EQ(s.discarded.at("a").other_values, "2");
  // absence in one run is a difference
  EXPECT_EQ(s.discarded.at("b").other_values, "<absent>");
  EXPECT_EQ(s.environments.at("a"), (std::set<std::string>{"env0", "env1"}));
}

TEST(ClassifyPoints, RepeatedValuesCompareAsSequences) {
  std::vector<TraceSet> runs{run_of("r0", "env0", {{"a", "1"}, {"a", "2"}}),
                             run_of("r1", "env0", {{"a", "2"}, {"a", "1"}})};
  EXPECT_EQ(classify_points({"a"}, runs).discarded.count("a"), 1u);
}

TEST(PerturbEnvironment, IndexZeroIsIdentity) {
  EnvironmentPerturbation base;
  EXPECT_EQ(perturb_environment(base, 0), base);
}

TEST(PerturbEnvironment, DeterministicAndDistinct) {
  EnvironmentPerturbation base;
  EnvironmentPerturbation a = perturb_environment(base, 1);
  EXPECT_EQ(a, perturb_environment(base, 1));
  EnvironmentPerturbation b = perturb_environment(base, 2);
  EXPECT_NE(a.visible_workdir, base.visible_workdir);
  EXPECT_NE(a.visible_workdir, b.visible_workdir);
  for (const char* k : {"HOME", "TMPDIR", "LANG", "LC_ALL", "TZ"}) EXPECT_TRUE(a.vars.count(k)) << k;
}

TEST(Calibrate, DiscardsClockRngAndCwd) {
  Program p = program_of("Probe.mj", kProbe);
  InstrumentedSuite ats = probe_suite(p);
  TempDir dir("cal");
  LocalRunner runner;
  CalibrationConfig cfg;
  cfg.runs_per_environment = 5;
  StablePointSet s = calibrate_serial(ats, p, cfg, runner, options_in(dir));
  std::set<std::string> discarded;
  for (const auto& [id, _] : s.discarded) discarded.insert(id);
  EXPECT_EQ(discarded,
            (std::set<std::string>{point("getStamp"), point("getRoll"), point("getDir")}));
  EXPECT_TRUE(s.is_stable(point("getFixed")));
}

TEST(Calibrate, CwdOnlyVariesAcrossEnvironments) {
  Program p = program_of("Probe.mj", kProbe);
  InstrumentedSuite ats = probe_suite(p);
  TempDir dir("cal1");
  LocalRunner runner;
  CalibrationConfig one;
  one.runs_per_environment = 4;
  one.environments = 1;
  StablePointSet s1 = calibrate_serial(ats, p, one, runner, options_in(dir));
  EXPECT_TRUE(s1.is_stable(point("getDir")));
  CalibrationConfig three = one;
  three.environments = 3;
  StablePointSet s3 = calibrate_serial(ats, p, three, runner, options_in(dir));
  // more environments never make a point stable again
  for (const auto& [id, _] : s1.discarded) EXPECT_TRUE(s3.discarded.count(id)) << id;
  EXPECT_FALSE(s3.is_stable(point("getDir")));
}

TEST(Calibrate, ParallelMatchesSerial) {
  Program p = program_of("Probe.mj", kProbe);
  InstrumentedSuite ats = probe_suite(p);
  TempDir dir("calp");
  LocalRunner runner;
  CalibrationConfig cfg;
  cfg.runs_per_environment = 4;
  StablePointSet a = calibrate_serial(ats, p, cfg, runner, options_in(dir));
  StablePointSet b = calibrate_parallel(ats, p, cfg, runner, options_in(dir), 3);
  EXPECT_EQ(a.stable, b.stable);
  std::set<std::string> da, db;
  for (const auto& [id, _] : a.discarded) da.insert(id);
  for (const auto& [id, _] : b.discarded) db.insert(id);
  EXPECT_EQ(da, db);
  EXPECT_EQ(stats_json(a.reference_stats), stats_json(b.reference_stats));
}

TEST(Calibrate, ConfigValidation) {
  CalibrationConfig cfg;
  cfg.runs_per_environment = 1;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigError);
  cfg.runs_per_environment = 2;
  cfg.environments = 0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigError);
}

TEST(Calibrate, JsonListsDiscardsWithEvidence) {
  Program p = program_of("Probe.mj", kProbe);
  InstrumentedSuite ats = probe_suite(p);
  TempDir dir("calj");
  LocalRunner runner;
  CalibrationConfig cfg;
  cfg.runs_per_environment = 3;
  StablePointSet s = calibrate_serial(ats, p, cfg, runner, options_in(dir));
  auto j = nlohmann::json::parse(calibration_json(s, ats));
  EXPECT_NE(j.dump().find("getStamp"), std::string::npos);
}
