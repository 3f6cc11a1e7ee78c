#include <gtest/gtest.h>

#include "nvamp/divergence.hpp"
#include "support.hpp"

using namespace nvamp;
using nvamp::testing::code_of;

namespace {

using Records = std::vector<lang::ObsRecord>;

TraceSet trace(const std::string& program, std::vector<std::pair<std::string, Records>> tests,
               const std::string& env = "env0") {
  TraceSet t;
  t.program_id = program;
  t.run_id = "r";
  t.environment = env;
  t.suite_digest = "digest";
  for (auto& [name, records] : tests) t.tests.push_back({name, records});
  return t;
}

StablePointSet stable_of(std::set<std::string> ids) {
  StablePointSet s;
  s.stable = std::move(ids);
  return s;
}

lang::ObsRecord v(const std::string& id, const std::string& value) { return {id, value, false}; }
lang::ObsRecord ex(const std::string& id, const std::string& message) { return {id, message, true}; }

}  // namespace

TEST(Compare, IdenticalTracesDoNotDiverge) {
  TraceSet a = trace("a", {{"t", {v("p1", "1"), v("p2", "x")}}});
  TraceSet b = a;
  b.program_id = "b";
  DivergenceReport r = compare(a, b, stable_of({"p1", "p2"}));
  EXPECT_EQ(r.count, 0);
  EXPECT_EQ(r.verdict, Verdict::kNotDetected);
  EXPECT_EQ(r.program_a, "a");
  EXPECT_EQ(r.program_b, "b");
}

TEST(Compare, ValueAgainstExceptionDiverges) {
  TraceSet a = trace("a", {{"t", {v("p1", "1"), v("p2", "2")}}});
  TraceSet b = trace("b", {{"t", {v("p1", "1"), ex("t@*:<exception>#0", "boom")}}});
  DivergenceReport r = compare(a, b, stable_of({"p1", "p2", "t@*:<exception>#0"}));
  EXPECT_EQ(r.count, 2);
  EXPECT_EQ(r.verdict, Verdict::kNvpDiverse);
  ASSERT_EQ(r.diverging.size(), 2u);
  EXPECT_EQ(r.diverging[0], (DivergingPoint{"p2", "2", "<absent>"}));
  EXPECT_EQ(r.diverging[1].point_id, "t@*:<exception>#0");
  EXPECT_EQ(r.diverging[1].value_a, "<absent>");
}

TEST(Compare, UnstablePointsAreIgnored) {
  TraceSet a = trace("a", {{"t", {v("p1", "1"), v("clock", "10")}}});
  TraceSet b = trace("b", {{"t", {v("p1", "1"), v("clock", "11")}}});
  EXPECT_EQ(compare(a, b, stable_of({"p1"})).count, 0);
  EXPECT_EQ(compare(a, b, stable_of({"p1", "clock"})).count, 1);
}

TEST(Compare, WholeSequenceIsOnePoint) {
  TraceSet a = trace("a", {{"t", {v("p", "1"), v("p", "2")}}});
  TraceSet b = trace("b", {{"t", {v("p", "1"), v("p", "3")}}});
  DivergenceReport r = compare(a, b, stable_of({"p"}));
  EXPECT_EQ(r.count, 1);
  EXPECT_EQ(r.diverging[0].value_a, "1 | 2");
  EXPECT_EQ(r.diverging[0].value_b, "1 | 3");
}

TEST(Compare, DroppedTestOnOneSideCounts) {
  TraceSet a = trace("a", {{"t", {v("p", "1")}}, {"u", {v("q", "2")}}});
  TraceSet b = trace("b", {{"t", {v("p", "1")}}});
  EXPECT_EQ(compare(a, b, stable_of({"p", "q"})).count, 1);
}

TEST(Compare, IsSymmetric) {
  TraceSet a = trace("a", {{"t", {v("p1", "1"), v("p2", "2")}}, {"u", {v("p3", "z")}}});
  TraceSet b = trace("b", {{"t", {v("p1", "9")}}, {"u", {v("p3", "z"), v("p4", "w")}}});
  StablePointSet s = stable_of({"p1", "p2", "p3", "p4"});
  DivergenceReport ab = compare(a, b, s);
  DivergenceReport ba = compare(b, a, s);
  EXPECT_EQ(ab.count, ba.count);
  ASSERT_EQ(ab.diverging.size(), ba.diverging.size());
  for (std::size_t i = 0; i < ab.diverging.size(); ++i) {
    EXPECT_EQ(ab.diverging[i].point_id, ba.diverging[i].point_id);
    EXPECT_EQ(ab.diverging[i].value_a, ba.diverging[i].value_b);
  }
}

TEST(Compare, MismatchedRunsAreRejected) {
  TraceSet a = trace("a", {{"t", {}}});
  TraceSet b = trace("b", {{"t", {}}}, "env1");
  EXPECT_EQ(code_of([&] { compare(a, b, stable_of({})); }), ErrorCode::kTraceMismatch);
  TraceSet c = trace("c", {{"t", {}}});
  c.suite_digest = "other";
  EXPECT_EQ(code_of([&] { compare(a, c, stable_of({})); }), ErrorCode::kTraceMismatch);
}

TEST(CombineEnvironments, UnionOfDivergingPoints) {
  StablePointSet s = stable_of({"p", "q", "r"});
  DivergenceReport e0 = compare(trace("a", {{"t", {v("p", "1"), v("q", "1")}}}),
                                trace("b", {{"t", {v("p", "2"), v("q", "1")}}}), s);
  DivergenceReport e1 =
      compare(trace("a", {{"t", {v("p", "3"), v("q", "1")}}}, "env1"),
              trace("b", {{"t", {v("p", "4"), v("q", "5")}}}, "env1"), s);
  DivergenceReport all = combine_environments({e0, e1});
  EXPECT_EQ(all.count, 2);
  EXPECT_EQ(all.verdict, Verdict::kNvpDiverse);
  ASSERT_EQ(all.diverging.size(), 2u);
  EXPECT_EQ(all.diverging[0].value_a, "1");
  EXPECT_EQ(all.environments, (std::vector<std::string>{"env0", "env1"}));
}

TEST(MeanDivergence, ArithmeticMean) {
  DivergenceReport a;
  a.count = 2;
  DivergenceReport b;
  b.count = 4;
  EXPECT_DOUBLE_EQ(mean_divergence({a, b}), 3.0);
  EXPECT_EQ(code_of([] { mean_divergence({}); }), ErrorCode::kEmptySet);
}

TEST(Ablate, ReportPerModeAndRicherModeSeesMore) {
  StablePointSet full = stable_of({"in", "obs"});
  StablePointSet input = stable_of({"in"});
  TraceSet a = trace("a", {{"t", {v("in", "1"), v("obs", "1")}}});
  TraceSet b = trace("b", {{"t", {v("in", "1"), v("obs", "2")}}});
  TraceSet a_in = trace("a", {{"t", {v("in", "1")}}});
  TraceSet b_in = trace("b", {{"t", {v("in", "1")}}});
  std::map<ObservationMode, ModeTraces> inputs;
  inputs[ObservationMode::kFull] = {a, b, &full};
  inputs[ObservationMode::kInputOnly] = {a_in, b_in, &input};
  auto reports = ablate(inputs);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports.at(ObservationMode::kFull).mode, ObservationMode::kFull);
  EXPECT_EQ(reports.at(ObservationMode::kFull).count, 1);
  EXPECT_EQ(reports.at(ObservationMode::kInputOnly).count, 0);
}
