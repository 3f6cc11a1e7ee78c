#include <gtest/gtest.h>

#include "nvamp/amplifier.hpp"
#include "nvamp/executor.hpp"
#include "nvamp/lang/parser.hpp"
#include "nvamp/lang/printer.hpp"
#include "nvamp/observer.hpp"
#include "nvamp/pipeline.hpp"
#include "support.hpp"

using namespace nvamp;
using nvamp::testing::code_of;
using nvamp::testing::corpus_dir;
using nvamp::testing::program_of;
using nvamp::testing::suite_of;
using nvamp::testing::TempDir;

namespace {

const char* kCounter = R"(public class Counter {
  public int count;
  private List items = new ArrayList();

  public int getSize() {
    return items.size();
  }

  public boolean isEmpty() {
    return items.size() == 0;
  }

  public int getAt(int i) {
    return i;
  }

  public String isNamed() {
    return "x";
  }

  public static int getStatic() {
    return 1;
  }

  public void add(int x) {
    if (x < 0) {
      throw new IllegalArgumentException("negative " + x);
    }
    items.add(x);
    count = count + 1;
  }

  public String toString() {
    return "Counter" + count;
  }
}
)";

const char* kCounterTest = R"(import static unit.Assert.*;

public class CounterTest {
  @Test
  public void testAdd() {
    Counter c = new Counter();
    c.add(1);
    assertEquals(1, c.getSize());
  }

  @Test
  public void testThrows() {
    Counter c = new Counter();
    c.add(-1);
    c.add(2);
  }

  @Test
  public void testPlain() {
    int x = 1;
  }
}
)";

lang::Method method(const std::string& src) {
  auto unit = lang::parse_unit("public class X {\n" + src + "\n}\n", "X.mj");
  return unit.classes[0].methods[0];
}

AccessorCatalog counter_catalog() { return build_catalog(program_of("Counter.mj", kCounter).units); }

std::vector<std::string> ids(const std::vector<ObservationPoint>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.point_id);
  return out;
}

}  // namespace

TEST(IsAccessor, PredicateTable) {
  EXPECT_TRUE(is_accessor(method("public int getX() { return 1; }")));
  EXPECT_FALSE(is_accessor(method("public int getX(int a) { return a; }")));
  EXPECT_FALSE(is_accessor(method("public void getX() { }")));
  EXPECT_TRUE(is_accessor(method("public boolean isY() { return true; }")));
  EXPECT_FALSE(is_accessor(method("public int isY() { return 1; }")));
  EXPECT_FALSE(is_accessor(method("private int getX() { return 1; }")));
  EXPECT_FALSE(is_accessor(method("public static int getX() { return 1; }")));
  EXPECT_FALSE(is_accessor(method("public int size() { return 1; }")));
}

TEST(Catalog, GettersFieldsAndRendering) {
  AccessorCatalog c = counter_catalog();
  const TypeAccessors& t = c.types.at("Counter");
  EXPECT_EQ(t.getters, (std::vector<std::string>{"getSize", "isEmpty"}));
  EXPECT_EQ(t.fields, (std::vector<std::string>{"count"}));
  EXPECT_TRUE(t.debug_render);
}

TEST(DiscoverPoints, FourPointsForOneObject) {
  TestSuite s = suite_of("CounterTest.mj", kCounterTest);
  TestCase stripped = strip_assertions(s.tests[1]);
  auto points = discover_points(stripped, counter_catalog());
  ASSERT_EQ(points.size(), 4u);
  std::map<PointSource, int> by_source;
  for (const auto& p : points) ++by_source[p.source];
  EXPECT_EQ(by_source[PointSource::kGetter], 2);
  EXPECT_EQ(by_source[PointSource::kPublicField], 1);
  EXPECT_EQ(by_source[PointSource::kDebugRender], 1);
  for (const auto& p : points) EXPECT_EQ(p.receiver, "c");
}

TEST(DiscoverPoints, AssertionCallsBecomePoints) {
  TestSuite s = suite_of("CounterTest.mj", kCounterTest);
  TestCase stripped = strip_assertions(s.tests[0]);
  auto points = discover_points(stripped, counter_catalog());
  ASSERT_EQ(points.size(), 5u);
  EXPECT_EQ(points[0].source, PointSource::kOriginalAssertionCall);
  EXPECT_EQ(points[0].point_id, "testAdd@2:c.getSize/0#0");
  EXPECT_EQ(ids(points), (std::vector<std::string>{
                             "testAdd@2:c.getSize/0#0",
                             "testAdd@2:c.count#0",
                             "testAdd@2:c.getSize()#0",
                             "testAdd@2:c.isEmpty()#0",
                             "testAdd@2:c.toString()#0",
                         }));
}

TEST(DiscoverPoints, NoObjectsNoPoints) {
  TestSuite s = suite_of("CounterTest.mj", kCounterTest);
  EXPECT_TRUE(discover_points(s.tests[2], counter_catalog()).empty());
}

TEST(DiscoverPoints, FileLikeObjectExposesBothPaths) {
  Program p = program_of("Doc.mj", R"(public class Doc {
  private String name;

  public Doc(String name) {
    this.name = name;
  }

  public String getAbsolutePath() {
    return Files.absolutePath(name);
  }

  public String getCanonicalPath() {
    return System.cwd() + "/" + name;
  }
}
)");
  TestSuite s = suite_of("DocTest.mj", R"(public class DocTest {
  @Test
  public void t() {
    Doc f = new Doc("a.txt");
  }
}
)");
  auto points = discover_points(s.tests[0], build_catalog(p.units));
  std::set<std::string> accessors;
  for (const auto& pt : points) accessors.insert(pt.accessor);
  EXPECT_EQ(accessors, (std::set<std::string>{"getAbsolutePath()", "getCanonicalPath()"}));
}

TEST(Instrument, LogsAfterAnchorAndIsIdempotent) {
  TestSuite s = suite_of("CounterTest.mj", kCounterTest);
  TestCase stripped = strip_assertions(s.tests[1]);
  auto points = discover_points(stripped, counter_catalog());
  TestCase once = instrument(stripped, points);
  EXPECT_TRUE(once.instrumented);
  int logging = 0;
  for_each_statement(once.statements, [&](const Statement& st) {
    std::string text = lang::print_stmt(st.node);
    if (text.find("Observe.") != std::string::npos) ++logging;
  });
  EXPECT_EQ(logging, 4);
  EXPECT_EQ(instrument(once, points), once);
}

TEST(Instrument, RejectsReceiverOutOfScope) {
  TestSuite s = suite_of("CounterTest.mj", kCounterTest);
  ObservationPoint p;
  p.point_id = "testPlain@0:ghost.getSize#0";
  p.source = PointSource::kGetter;
  p.test = "testPlain";
  p.anchor = "0";
  p.receiver = "ghost";
  p.accessor = "getSize";
  EXPECT_EQ(code_of([&] { instrument(s.tests[2], {p}); }), ErrorCode::kInstrumentationError);
}

TEST(Instrument, ThrowingTestLogsOneExceptionAndStops) {
  Program prog = program_of("Counter.mj", kCounter);
  TestSuite s = suite_of("CounterTest.mj", kCounterTest);
  AmplifiedSuite ats = amplify(s, 1);
  TestSuite only;
  only.files = ats.suite.files;
  for (const auto& t : ats.suite.tests) {
    if (t.name == "testAdd" || t.name == "testThrows") only.tests.push_back(t);
  }
  InstrumentedSuite inst = instrument_suite(only, counter_catalog(), ObservationMode::kFull);
  TempDir dir("obs");
  SuiteRun run = run_suite(inst.suite, static_cast<int>(inst.points.size()), prog,
                           EnvironmentPerturbation{}, "r", nvamp::testing::options_in(dir));
  EXPECT_TRUE(run.stats.failed.empty());
  // testThrows throws before its first record and is dropped as non-executable
  EXPECT_EQ(run.stats.dropped_nonexecutable, 1);
  ASSERT_EQ(run.trace.tests.size(), 1u);
  EXPECT_EQ(run.trace.tests[0].test, "testAdd");
}

TEST(Instrument, ExceptionAfterFirstRecordIsObserved) {
  Program prog = program_of("Counter.mj", kCounter);
  TestSuite s = suite_of("CounterTest.mj", R"(import static unit.Assert.*;

public class CounterTest {
  @Test
  public void t() {
    Counter c = new Counter();
    c.add(1);
    assertEquals(1, c.getSize());
    c.add(-5);
    assertEquals(2, c.getSize());
  }
}
)");
  AmplifiedSuite ats = amplify(s, 1);
  TestSuite only;
  only.files = ats.suite.files;
  only.tests.push_back(ats.suite.tests[0]);
  InstrumentedSuite inst = instrument_suite(only, counter_catalog(), ObservationMode::kFull);
  TempDir dir("exc");
  SuiteRun run = run_suite(inst.suite, static_cast<int>(inst.points.size()), prog,
                           EnvironmentPerturbation{}, "r", nvamp::testing::options_in(dir));
  ASSERT_EQ(run.trace.tests.size(), 1u);
  const auto& records = run.trace.tests[0].records;
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].point_id, "t@2:c.getSize/0#0");
  EXPECT_EQ(records[0].value, "1");
  EXPECT_EQ(records[1].point_id, exception_point_id("t"));
  EXPECT_TRUE(records[1].exception);
  EXPECT_NE(records[1].value.find("negative -5"), std::string::npos) << records[1].value;
}

TEST(FilterPoints, ModesKeepTheirSources) {
  TestSuite s = suite_of("CounterTest.mj", kCounterTest);
  AmplifiedSuite ats = amplify(s, 1);
  AccessorCatalog c = counter_catalog();
  InstrumentedSuite full = instrument_suite(ats.suite, c, ObservationMode::kFull);
  InstrumentedSuite input = instrument_suite(ats.suite, c, ObservationMode::kInputOnly);
  EXPECT_GT(full.points.size(), input.points.size());
  std::set<std::string> full_ids;
  for (const auto& p : full.points) full_ids.insert(p.point_id);
  for (const auto& p : input.points) {
    EXPECT_TRUE(p.source == PointSource::kOriginalAssertionCall ||
                p.source == PointSource::kExceptionMessage);
    EXPECT_TRUE(full_ids.count(p.point_id)) << p.point_id;
  }
  auto kept = filter_points(full.points, ObservationMode::kTdr);
  EXPECT_EQ(kept.size(), input.points.size());
}

TEST(InstrumentSuite, PointIdsDependOnlyOnTheSuite) {
  Fixture fx = load_fixture(corpus_dir() / "calculator");
  AmplifiedSuite ats = amplify(fx.suite, 42);
  InstrumentedSuite a = instrument_suite(ats.suite, build_catalog(fx.original.units),
                                         ObservationMode::kFull);
  for (const auto& v : fx.variants) {
    InstrumentedSuite b = instrument_suite(ats.suite, build_catalog(v.units), ObservationMode::kFull);
    EXPECT_EQ(a.points, b.points) << v.id;
  }
  InstrumentedSuite again = instrument_suite(ats.suite, build_catalog(fx.original.units),
                                             ObservationMode::kFull);
  EXPECT_EQ(a.suite, again.suite);
}
