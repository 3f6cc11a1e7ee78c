#include <gtest/gtest.h>

#include "nvamp/test_ir.hpp"
#include "nvamp/util.hpp"
#include "support.hpp"

using namespace nvamp;
using nvamp::testing::code_of;
using nvamp::testing::corpus_dir;
using nvamp::testing::suite_of;
using nvamp::testing::TempDir;

namespace {

const char* kTwoTests = R"(import static unit.Assert.*;

public class BagTest {
  @Test
  public void testOne() {
    Bag b = new Bag();
    b.add("x");
    assertEquals(1, b.getSize());
  }

  @Test
  public void testTwo() {
    Bag b = new Bag();
    b.add("y", 2, true);
    assertFalse(b.getMap().containsKey("z"));
  }

  public void helper() {
    int unused = 0;
  }
}
)";

}  // namespace

TEST(IsAssertion, NameAndProvenanceTable) {
  struct Row {
    const char* name;
    bool framework;
    bool expected;
  };
  const Row rows[] = {
      {"assertEquals", true, true},  {"assertEquals", false, false},
      {"failNotEquals", true, true}, {"fail", false, false},
      {"fail", true, true},          {"AssertThat", true, true},
      {"isFailure", true, true},     {"compute", true, false},
      {"compute", false, false},     {"asset", true, false},
  };
  for (const auto& r : rows) {
    EXPECT_EQ(is_assertion(r.name, r.framework), r.expected) << r.name << " " << r.framework;
  }
}

TEST(ParseTests, TwoTestsThreeStatementsEach) {
  TestSuite s = suite_of("BagTest.mj", kTwoTests);
  ASSERT_EQ(s.tests.size(), 2u);
  EXPECT_EQ(s.tests[0].name, "testOne");
  EXPECT_EQ(count_statements(s.tests[0]) + count_statements(s.tests[1]), 6u);
  ASSERT_EQ(s.files.size(), 1u);
  EXPECT_EQ(s.files[0].helpers.size(), 1u);
}

TEST(ParseTests, AssertionWithOneCallArgument) {
  TestSuite s = suite_of("BagTest.mj", kTwoTests);
  const Statement& a = s.tests[1].statements.back();
  EXPECT_EQ(a.kind, StatementKind::kAssertion);
  EXPECT_EQ(a.callee, "assertFalse");
  const lang::Expr& call = a.assertion_call();
  ASSERT_EQ(call.arg_count(), 1u);
  EXPECT_EQ(call.arg(0).kind, lang::ExprKind::kCall);
  EXPECT_EQ(call.arg(0).text, "containsKey");
}

TEST(ParseTests, LiteralSlotsAreUniqueAndTyped) {
  TestSuite s = suite_of("BagTest.mj", kTwoTests);
  const Statement& add = s.tests[1].statements[1];
  ASSERT_EQ(add.literal_slots.size(), 3u);
  EXPECT_EQ(add.literal_slots[0].kind, LiteralKind::kString);
  EXPECT_EQ(add.literal_slots[1].kind, LiteralKind::kInteger);
  EXPECT_EQ(add.literal_slots[2].kind, LiteralKind::kBoolean);
  EXPECT_EQ(add.literal_slots[2].id.str(), "testTwo/1/2");
  std::set<SlotId> ids;
  std::size_t total = 0;
  for (const auto& t : s.tests) {
    for_each_statement(t.statements, [&](const Statement& st) {
      for (const auto& slot : st.literal_slots) {
        ids.insert(slot.id);
        ++total;
      }
    });
  }
  EXPECT_EQ(ids.size(), total);
}

TEST(ParseTests, UnqualifiedCallWithoutFrameworkImportIsNotAnAssertion) {
  TestSuite s = suite_of("T.mj", R"(public class T {
  @Test
  public void t() {
    assertSomething(1);
  }

  public void assertSomething(int x) {
  }
}
)");
  EXPECT_EQ(s.tests[0].statements[0].kind, StatementKind::kSimple);
}

TEST(ParseTests, OrdinalsArePreOrder) {
  TestSuite s = suite_of("T.mj", R"(import static unit.Assert.*;

public class T {
  @Test
  public void t() {
    int total = 0;
    for (int i = 0; i < 3; i++) {
      total = total + i;
      total = total * 2;
    }
    assertEquals(8, total);
  }
}
)");
  const TestCase& t = s.tests[0];
  std::vector<int> ordinals;
  for_each_statement(t.statements, [&](const Statement& st) { ordinals.push_back(st.ordinal); });
  EXPECT_EQ(ordinals, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(t.statements[1].kind, StatementKind::kCompound);
  EXPECT_EQ(t.statements[1].children.size(), 2u);
  // the for-init literal belongs to the loop header
  EXPECT_EQ(t.statements[1].literal_slots.size(), 2u);
}

TEST(ParseTests, RejectsUnsupportedConstructs) {
  const char* nested = R"(public class T {
  @Test
  public void t() {
    for (int i = 0; i < 2; i++) {
      if (i > 0) {
        int x = i;
      }
    }
  }
}
)";
  EXPECT_EQ(code_of([&] { suite_of("T.mj", nested); }), ErrorCode::kUnsupportedConstruct);
  const char* while_loop = R"(public class T {
  @Test
  public void t() {
    while (true) {
      break;
    }
  }
}
)";
  EXPECT_EQ(code_of([&] { suite_of("T.mj", while_loop); }), ErrorCode::kUnsupportedConstruct);
  EXPECT_EQ(code_of([&] { suite_of("T.mj", "public class T { @Test public void t( }"); }),
            ErrorCode::kParseError);
}

TEST(ParseTests, EmptyCorpusHasNoTests) {
  TempDir dir("empty");
  std::filesystem::create_directories(dir.path() / "tests");
  EXPECT_TRUE(parse_tests(dir.path()).tests.empty());
}

TEST(RenderTests, RoundTripOverCorpus) {
  for (const auto& fx : {"calculator", "glossary", "registry", "session", "stack"}) {
    TestSuite s = parse_tests(corpus_dir() / fx);
    TempDir dir("render");
    auto written = render_tests(s, dir.path() / "tests");
    ASSERT_EQ(written.size(), s.files.size());
    TestSuite again = parse_tests(dir.path());
    EXPECT_EQ(s, again) << fx;
  }
}

TEST(RenderTests, GeneratedNamesCarryTheDescriptor) {
  TestSuite s = suite_of("BagTest.mj", kTwoTests);
  TestCase g = s.tests[0];
  g.generated = true;
  g.parent = "testOne";
  g.transform.kind = TransformKind::kStmtDup;
  g.transform.ordinal = 1;
  g.name = g.parent + "_" + g.transform.name_suffix();
  s.tests.push_back(g);
  std::string text = render_file(s, 0);
  EXPECT_NE(text.find("public void testOne_Add_1()"), std::string::npos) << text;
}

TEST(RenderTests, EmptySuiteEmitsNoFiles) {
  TestSuite s = suite_of("BagTest.mj", kTwoTests);
  s.tests.clear();
  TempDir dir("none");
  EXPECT_TRUE(render_tests(s, dir.path()).empty());
}

TEST(ExceptionPoint, IdentityIsTestScoped) {
  EXPECT_EQ(exception_point_id("testA"), "testA@*:<exception>#0");
}
