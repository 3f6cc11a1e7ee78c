#include <gtest/gtest.h>

#include "json.hpp"
#include "nvamp/amplifier.hpp"
#include "nvamp/executor.hpp"
#include "nvamp/observer.hpp"
#include "nvamp/pipeline.hpp"
#include "support.hpp"

using namespace nvamp;
using nvamp::testing::code_of;
using nvamp::testing::corpus_dir;
using nvamp::testing::options_in;
using nvamp::testing::program_of;
using nvamp::testing::suite_of;
using nvamp::testing::TempDir;

namespace {

const char* kBox = R"(public class Box {
  private List items = new ArrayList();

  public void put(String s) {
    items.add(s);
  }

  public String take() {
    if (items.size() == 0) {
      throw new IllegalStateException("empty");
    }
    String s = items.get(0);
    items.remove(0);
    return s;
  }

  public int getCount() {
    return items.size();
  }

  public void spin(int n) {
    int i = 0;
    while (i < n) {
      i = i + 0;
    }
  }
}
)";

std::string ten_tests() {
  std::string src = "import static unit.Assert.*;\n\npublic class BoxTest {\n";
  for (int i = 0; i < 10; ++i) {
    src += "  @Test\n  public void t" + std::to_string(i) + "() {\n    Box b = new Box();\n" +
           "    b.put(\"v" + std::to_string(i) + "\");\n    assertEquals(1, b.getCount());\n  }\n\n";
  }
  return src + "}\n";
}

InstrumentedSuite instrumented(const TestSuite& s, const Program& p) {
  return instrument_suite(s, build_catalog(p.units), ObservationMode::kFull);
}

SuiteRun run(const InstrumentedSuite& inst, const Program& p, const TempDir& dir,
             const std::string& run_id = "r") {
  return run_suite(inst.suite, static_cast<int>(inst.points.size()), p, EnvironmentPerturbation{},
                   run_id, options_in(dir));
}

}  // namespace

TEST(RunSuite, AllExecutable) {
  Program p = program_of("Box.mj", kBox);
  TestSuite s = suite_of("BoxTest.mj", ten_tests());
  TempDir dir("exec");
  SuiteRun r = run_suite(s, 0, p, EnvironmentPerturbation{}, "r", options_in(dir));
  EXPECT_EQ(r.stats.tests_declared, 10);
  EXPECT_EQ(r.stats.tests_executed, 10);
  EXPECT_EQ(r.stats.dropped_nonexecutable, 0);
  EXPECT_TRUE(r.stats.failed.empty());
  EXPECT_EQ(r.trace.tests.size(), 10u);
}

TEST(RunSuite, BrokenDataDependencyIsDropped) {
  Program p = program_of("Box.mj", kBox);
  TestSuite s = suite_of("BoxTest.mj", R"(import static unit.Assert.*;

public class BoxTest {
  @Test
  public void t() {
    Box b = new Box();
    b.put("a");
    assertEquals("a", b.take());
  }
}
)");
  AmplifiedSuite ats = amplify(s, 1);
  InstrumentedSuite inst = instrumented(ats.suite, p);
  TempDir dir("drop");
  SuiteRun r = run(inst, p, dir);
  // removing `b.put("a")` makes take() throw first; removing the
  // declaration breaks the build of that test
  std::set<std::string> dropped;
  for (const auto& d : r.stats.dropped) dropped.insert(d.substr(0, d.find(':')));
  EXPECT_EQ(dropped, (std::set<std::string>{"t_Remove_0", "t_Remove_1", "t_Add_0"}));
  EXPECT_EQ(r.stats.dropped_nonexecutable, 3);
  for (const auto& t : r.trace.tests) EXPECT_FALSE(dropped.count(t.test));
  EXPECT_GE(r.stats.tests_executed, r.stats.tests_declared - r.stats.dropped_nonexecutable);
  EXPECT_EQ(r.stats.points_executed, static_cast<int>(r.trace.record_count()));
}

TEST(RunSuite, TimeoutIsDropped) {
  Program p = program_of("Box.mj", kBox);
  TestSuite s = suite_of("BoxTest.mj", R"(public class BoxTest {
  @Test
  public void t() {
    Box b = new Box();
    b.spin(1);
  }
}
)");
  TempDir dir("timeout");
  RunOptions o = options_in(dir);
  o.timeout = std::chrono::milliseconds(200);
  SuiteRun r = run_suite(s, 0, p, EnvironmentPerturbation{}, "r", o);
  EXPECT_EQ(r.stats.dropped_nonexecutable, 1);
  ASSERT_EQ(r.stats.dropped.size(), 1u);
  EXPECT_NE(r.stats.dropped[0].find("timeout"), std::string::npos) << r.stats.dropped[0];
}

TEST(RunSuite, ProgramThatDoesNotBuild) {
  Program p = program_of("Box.mj", "public class Box {\n  public int f() { return g; }\n}\n");
  TestSuite s = suite_of("BoxTest.mj", ten_tests());
  TempDir dir("build");
  EXPECT_EQ(code_of([&] { run_suite(s, 0, p, EnvironmentPerturbation{}, "r", options_in(dir)); }),
            ErrorCode::kBuildError);
}

TEST(RunSuite, DeterministicAndIsolated) {
  Program p = program_of("Box.mj", kBox);
  AmplifiedSuite ats = amplify(suite_of("BoxTest.mj", ten_tests()), 3);
  InstrumentedSuite inst = instrumented(ats.suite, p);
  TempDir dir("det");
  SuiteRun a = run(inst, p, dir);
  SuiteRun b = run(inst, p, dir);
  EXPECT_EQ(format_trace(a.trace), format_trace(b.trace));
  // dropping every other test leaves the remaining traces untouched
  InstrumentedSuite half = inst;
  half.suite.tests.clear();
  for (std::size_t i = 0; i < inst.suite.tests.size(); i += 2) {
    half.suite.tests.push_back(inst.suite.tests[i]);
  }
  SuiteRun c = run(half, p, dir);
  for (const auto& t : c.trace.tests) {
    const TestTrace* full = a.trace.find(t.test);
    ASSERT_NE(full, nullptr);
    EXPECT_EQ(full->records, t.records) << t.test;
  }
}

TEST(RunSuite, NestedTestInvocationsAreCounted) {
  Program p = program_of("Box.mj", kBox);
  TestSuite s = suite_of("BoxTest.mj", R"(public class BoxTest {
  @Test
  public void generic() {
    Box b = new Box();
    b.put("x");
  }

  @Test
  public void caller() {
    generic();
    generic();
  }
}
)");
  TempDir dir("nested");
  SuiteRun r = run_suite(s, 0, p, EnvironmentPerturbation{}, "r", options_in(dir));
  EXPECT_EQ(r.stats.tests_declared, 2);
  EXPECT_EQ(r.stats.tests_executed, 4);
}

TEST(Coverage, EveryStatementOfASmallProgram) {
  Program p = program_of("Acc.mj", R"(public class Acc {
  private int total;

  public void add(int x) {
    if (x > 0) {
      total = total + x;
    } else {
      total = total - x;
    }
  }

  public int getTotal() {
    return total;
  }
}
)");
  TestSuite s = suite_of("AccTest.mj", R"(public class AccTest {
  @Test
  public void t() {
    Acc a = new Acc();
    a.add(1);
    a.add(-1);
    a.getTotal();
  }
}
)");
  TempDir dir("cov");
  auto covered = measure_coverage(s, p, options_in(dir));
  EXPECT_EQ(covered.size(), statement_sites(p.units).size());
  EXPECT_EQ(covered.size(), 4u);
  TestSuite empty = s;
  empty.tests.clear();
  EXPECT_TRUE(measure_coverage(empty, p, options_in(dir)).empty());
}

TEST(Coverage, AmplifiedSuiteCoversAtLeastTheOriginal) {
  for (const auto& fx_name : {"calculator", "glossary", "registry", "stack"}) {
    Fixture fx = load_fixture(corpus_dir() / fx_name);
    AmplifiedSuite ats = amplify(fx.suite, 42);
    TempDir dir("covamp");
    auto original = measure_coverage(fx.suite, fx.original, options_in(dir));
    auto amplified = measure_coverage(ats.suite, fx.original, options_in(dir));
    EXPECT_TRUE(std::includes(amplified.begin(), amplified.end(), original.begin(), original.end()))
        << fx_name;
  }
}

TEST(Trace, WireFormatRoundTrip) {
  TraceSet t;
  t.program_id = "p";
  t.run_id = "run1";
  t.environment = "env0";
  t.suite_digest = "d";
  t.tests.push_back({"testA", {{"testA@1:x.getV()#0", "4", false}, {"testA@*:<exception>#0", "boom", true}}});
  t.tests.push_back({"testB", {}});
  std::string text = format_trace(t);
  EXPECT_NE(text.find("run1\ttestA\ttestA@1:x.getV()#0\t4\n"), std::string::npos) << text;
  TraceSet back = parse_trace(text);
  EXPECT_EQ(back.run_id, "run1");
  ASSERT_EQ(back.find("testA")->records.size(), 2u);
  EXPECT_EQ(back.find("testA")->records, t.tests[0].records);
}

TEST(Jobs, ParallelMatchesSerial) {
  Fixture fx = load_fixture(corpus_dir() / "calculator");
  AmplifiedSuite ats = amplify(fx.suite, 42);
  InstrumentedSuite inst = instrumented(ats.suite, fx.original);
  std::vector<Job> jobs;
  std::vector<const Program*> programs{&fx.original};
  for (const auto& v : fx.variants) programs.push_back(&v);
  for (const Program* p : programs) {
    Job j;
    j.suite = &inst.suite;
    j.points_declared = static_cast<int>(inst.points.size());
    j.program = p;
    j.run_id = "j";
    jobs.push_back(j);
  }
  TempDir dir("jobs");
  LocalRunner runner;
  auto serial = run_jobs_serial(runner, jobs, options_in(dir));
  auto parallel = run_jobs_parallel(runner, jobs, options_in(dir), 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(format_trace(serial[i].trace), format_trace(parallel[i].trace));
    EXPECT_EQ(stats_json(serial[i].stats), stats_json(parallel[i].stats));
  }
}

TEST(Stats, JsonCarriesEveryCounter) {
  ExecStats s;
  s.tests_declared = 3;
  s.dropped = {"t: build: x"};
  auto j = nlohmann::json::parse(stats_json(s));
  for (const char* k : {"tests_declared", "tests_executed", "points_declared", "points_executed",
                        "dropped_nonexecutable"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["tests_declared"], 3);
}
