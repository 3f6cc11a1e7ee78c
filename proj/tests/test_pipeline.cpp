#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nvamp/pipeline.hpp"
#include "nvamp/util.hpp"
#include "support.hpp"

using namespace nvamp;
using nvamp::testing::code_of;
using nvamp::testing::corpus_dir;
using nvamp::testing::TempDir;
namespace fs = std::filesystem;

namespace {

const char* kAcc = R"(public class Acc {
  private int total;

  public void add(int x) {
    total = total + x;
  }

  public int getTotal() {
    return total;
  }
}
)";

const char* kAccTest = R"(import static unit.Assert.*;

public class AccTest {
  @Test
  public void t() {
    Acc a = new Acc();
    a.add(3);
    assertEquals(3, a.getTotal());
  }
}
)";

void put(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// fixture with one observably different variant and one identical copy
fs::path make_fixture(const fs::path& root, bool with_variants = true) {
  put(root / "src" / "Acc.mj", kAcc);
  put(root / "tests" / "AccTest.mj", kAccTest);
  if (with_variants) {
    std::string doubled = kAcc;
    doubled.replace(doubled.find("total + x"), 9, "total + x + x");
    put(root / "variants" / "doubled" / "src" / "Acc.mj", doubled);
    put(root / "variants" / "same" / "src" / "Acc.mj", kAcc);
  }
  return root;
}

PipelineConfig quick(const fs::path& corpus, const fs::path& out) {
  PipelineConfig cfg;
  cfg.corpus = corpus;
  cfg.out = out;
  cfg.seed = 7;
  cfg.runs = 2;
  cfg.environments = 2;
  cfg.workers = 1;
  return cfg;
}

std::string csv_header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

std::string joined(const nlohmann::json& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ",") + n.get<std::string>();
  return out;
}

}  // namespace

TEST(Multiplier, OneDecimal) {
  EXPECT_EQ(multiplier(672, 72), "×9.3");
  EXPECT_EQ(multiplier(34, 2), "×17.0");
  EXPECT_EQ(multiplier(1, 3), "×0.3");
}

TEST(Config, SeedIsRequired) {
  PipelineConfig cfg;
  cfg.corpus = corpus_dir() / "calculator";
  EXPECT_EQ(code_of([&] { cfg.require_seed(); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { detect(cfg); }), ErrorCode::kConfigError);
}

TEST(Config, FileKeysAndErrors) {
  TempDir dir("cfg");
  put(dir.path() / "c.json",
      R"({"corpus": "x", "seed": 5, "runs": 4, "envs": 2, "modes": ["FULL", "TDR"], "tdr_level": 2,
          "timeout_ms": 500, "oracle": false})");
  PipelineConfig cfg;
  load_config_file(dir.path() / "c.json", cfg);
  EXPECT_EQ(cfg.require_seed(), 5u);
  EXPECT_EQ(cfg.runs, 4);
  EXPECT_EQ(cfg.environments, 2);
  EXPECT_EQ(cfg.modes, (std::vector<ObservationMode>{ObservationMode::kFull, ObservationMode::kTdr}));
  EXPECT_EQ(cfg.tdr_level, 2);
  EXPECT_EQ(cfg.timeout.count(), 500);
  EXPECT_FALSE(cfg.oracle);
  put(dir.path() / "bad.json", R"({"seed": "five"})");
  EXPECT_EQ(code_of([&] { load_config_file(dir.path() / "bad.json", cfg); }), ErrorCode::kConfigError);
  put(dir.path() / "broken.json", "{");
  EXPECT_EQ(code_of([&] { load_config_file(dir.path() / "broken.json", cfg); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { parse_mode("BOTH"); }), ErrorCode::kConfigError);
}

TEST(LoadFixture, CorpusLayout) {
  Fixture fx = load_fixture(corpus_dir() / "calculator");
  EXPECT_EQ(fx.name, "calculator");
  ASSERT_EQ(fx.variants.size(), 3u);
  EXPECT_EQ(fx.variants[0].id, "identity-replace");
  EXPECT_EQ(fixture_roots(corpus_dir()).size(), 5u);
  TempDir dir("nofx");
  EXPECT_EQ(code_of([&] { load_fixture(dir.path()); }), ErrorCode::kConfigError);
}

TEST(Detect, ReportBundleValidatesAndMatchesTheSchema) {
  TempDir dir("detect");
  fs::path fx = make_fixture(dir.path() / "acc");
  DetectResult r = detect(quick(fx, dir.path() / "out"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(validate_report(r.report_json).empty());
  fs::path report = dir.path() / "out" / "report";
  for (const char* f : {"report.json", "summary.txt", "table2.csv", "table3.csv", "pairs.csv"}) {
    EXPECT_TRUE(fs::exists(report / f)) << f;
  }
  EXPECT_EQ(slurp(report / "report.json"), r.report_json);
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "ats"));

  auto schema = nlohmann::json::parse(slurp(corpus_dir().parent_path() / "schema" / "report.schema.json"));
  EXPECT_EQ(csv_header(slurp(report / "table2.csv")),
            joined(schema["properties"]["table2"]["items"]["required"]));
  EXPECT_EQ(csv_header(slurp(report / "table3.csv")),
            joined(schema["properties"]["table3"]["required"]));

  auto j = nlohmann::json::parse(r.report_json);
  std::map<std::string, std::string> full;
  for (const auto& p : j["pairs"]) {
    if (p["mode"] == "FULL") full[p["b"].get<std::string>()] = p["verdict"].get<std::string>();
  }
  EXPECT_EQ(full, (std::map<std::string, std::string>{{"doubled", "NVP_DIVERSE"},
                                                      {"same", "NOT_DETECTED"}}));
}

TEST(Detect, DeterministicBundle) {
  TempDir dir("detdet");
  fs::path fx = make_fixture(dir.path() / "acc");
  PipelineConfig a = quick(fx, dir.path() / "a");
  PipelineConfig b = quick(fx, dir.path() / "b");
  b.workers = 2;
  EXPECT_EQ(detect(a).report_json, detect(b).report_json);
  for (const char* f : {"summary.txt", "table2.csv", "table3.csv", "pairs.csv"}) {
    EXPECT_EQ(slurp(dir.path() / "a" / "report" / f), slurp(dir.path() / "b" / "report" / f)) << f;
  }
}

TEST(Detect, NoVariantsSaysNoPairs) {
  TempDir dir("nopairs");
  fs::path fx = make_fixture(dir.path() / "acc", false);
  DetectResult r = detect(quick(fx, dir.path() / "out"));
  EXPECT_TRUE(validate_report(r.report_json).empty());
  EXPECT_NE(render_summary(r.report_json).find("no pairs"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::parse(r.report_json)["summary"]["no_pairs"].get<bool>());
}

TEST(Detect, RedOriginalSuite) {
  TempDir dir("red");
  fs::path fx = make_fixture(dir.path() / "acc", false);
  std::string red = kAccTest;
  red.replace(red.find("assertEquals(3"), 14, "assertEquals(4");
  put(fx / "tests" / "AccTest.mj", red);
  EXPECT_EQ(code_of([&] { detect(quick(fx, dir.path() / "out")); }), ErrorCode::kOriginalSuiteRed);
}

TEST(Report, RenderingIsAFunctionOfReportJson) {
  TempDir dir("rerender");
  fs::path fx = make_fixture(dir.path() / "acc");
  DetectResult r = detect(quick(fx, dir.path() / "out"));
  fs::path report = dir.path() / "out" / "report";
  std::string summary = slurp(report / "summary.txt");
  fs::remove(report / "summary.txt");
  fs::remove(report / "pairs.csv");
  render_report(report);
  EXPECT_EQ(slurp(report / "summary.txt"), summary);
  EXPECT_EQ(slurp(report / "pairs.csv"), render_pairs_csv(r.report_json));
}

TEST(Report, ValidationFindsProblems) {
  EXPECT_FALSE(validate_report("{}").empty());
  EXPECT_FALSE(validate_report("not json").empty());
  auto j = nlohmann::json::parse(slurp(corpus_dir().parent_path() / "schema" / "report.schema.json"));
  EXPECT_TRUE(j.contains("properties"));
}

TEST(StageCache, UnsealedKeysAreMisses) {
  TempDir dir("cache");
  StageCache cache(dir.path());
  EXPECT_FALSE(cache.load("k", "a.txt"));
  cache.store("k", "a.txt", "hello");
  EXPECT_FALSE(cache.load("k", "a.txt"));
  cache.seal("k");
  EXPECT_TRUE(cache.sealed("k"));
  EXPECT_EQ(cache.load("k", "a.txt").value_or(""), "hello");
  EXPECT_FALSE(cache.load("k", "b.txt"));
}

TEST(StageCache, SecondDetectReusesStages) {
  TempDir dir("reuse");
  fs::path fx = make_fixture(dir.path() / "acc");
  PipelineConfig cfg = quick(fx, dir.path() / "out");
  std::string first = detect(cfg).report_json;
  EXPECT_EQ(detect(cfg).report_json, first);
}
