#include "nvamp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "nvamp/errors.hpp"
#include "nvamp/forge.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Defined in the generated source that embeds schema/report.schema.json.
extern const char* const kReportSchema;

ObservationMode parse_mode(const std::string& s) {
  for (auto m : {ObservationMode::kFull, ObservationMode::kInputOnly, ObservationMode::kTdr,
                 ObservationMode::kObservationOnly}) {
    if (s == to_string(m) || s == mode_key(m)) return m;
  }
  throw Error(ErrorCode::kConfigError, "unknown mode: " + s);
}

void PipelineConfig::resolve() {
  if (corpus.empty()) throw Error(ErrorCode::kConfigError, "corpus root is required");
  if (out.empty()) throw Error(ErrorCode::kConfigError, "output directory is required");
  require_seed();
  if (runs < 2) throw Error(ErrorCode::kConfigError, "runs must be at least 2");
  if (environments < 1) throw Error(ErrorCode::kConfigError, "envs must be at least 1");
  if (tdr_level < 1) throw Error(ErrorCode::kConfigError, "tdr_level must be at least 1");
  if (timeout.count() <= 0) throw Error(ErrorCode::kConfigError, "timeout must be positive");
  if (modes.empty()) throw Error(ErrorCode::kConfigError, "no modes selected");
  std::set<ObservationMode> unique(modes.begin(), modes.end());
  if (unique.size() != modes.size()) throw Error(ErrorCode::kConfigError, "duplicate mode");
  corpus = fs::absolute(corpus).lexically_normal();
  out = fs::absolute(out).lexically_normal();
  if (!fs::is_directory(corpus)) {
    throw Error(ErrorCode::kConfigError, "corpus root does not exist: " + corpus.string());
  }
}

std::uint64_t PipelineConfig::require_seed() const {
  if (!seed) throw Error(ErrorCode::kConfigError, "a seed is required");
  return *seed;
}

RunOptions PipelineConfig::run_options() const {
  RunOptions o;
  o.timeout = timeout;
  o.scratch = out / "scratch";
  return o;
}

void load_config_file(const fs::path& file, PipelineConfig& cfg) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, file.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.detail());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, "config must be a JSON object");
  fs::path base = file.parent_path();
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "corpus") {
        cfg.corpus = base / v.get<std::string>();
      } else if (key == "out") {
        cfg.out = base / v.get<std::string>();
      } else if (key == "seed") {
        cfg.seed = v.get<std::uint64_t>();
      } else if (key == "runs") {
        cfg.runs = v.get<int>();
      } else if (key == "envs") {
        cfg.environments = v.get<int>();
      } else if (key == "modes") {
        cfg.modes.clear();
        for (const auto& m : v) cfg.modes.push_back(parse_mode(m.get<std::string>()));
      } else if (key == "tdr_level") {
        cfg.tdr_level = v.get<int>();
      } else if (key == "timeout_ms") {
        cfg.timeout = std::chrono::milliseconds(v.get<long>());
      } else if (key == "oracle") {
        cfg.oracle = v.get<bool>();
      } else {
        throw Error(ErrorCode::kConfigError, "unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, file.string() + ": " + e.what());
  }
}

Fixture load_fixture(const fs::path& root) {
  Fixture fx;
  fx.name = root.filename().string();
  if (fx.name.empty()) fx.name = root.parent_path().filename().string();
  fx.original = Program::load(root / "src", "original");
  if (!fs::is_directory(root / "tests")) {
    throw Error(ErrorCode::kConfigError, "no tests directory in " + root.string());
  }
  fx.suite = parse_tests(root);
  std::vector<fs::path> dirs;
  if (fs::is_directory(root / "variants")) {
    for (const auto& e : fs::directory_iterator(root / "variants")) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    auto id = d.filename().string();
    if (id == "original") throw Error(ErrorCode::kConfigError, "variant id 'original' is reserved");
    fx.variants.push_back(Program::load(d / "src", id));
  }
  return fx;
}

std::vector<fs::path> fixture_roots(const fs::path& corpus) {
  if (fs::is_directory(corpus / "src")) return {corpus};
  std::vector<fs::path> out;
  if (fs::is_directory(corpus)) {
    for (const auto& e : fs::directory_iterator(corpus)) {
      if (e.is_directory() && fs::is_directory(e.path() / "src")) out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error(ErrorCode::kConfigError, "no fixtures under " + corpus.string());
  return out;
}

TestSuite mode_suite(ObservationMode mode, const AmplifiedSuite& full, const AmplifiedSuite& tdr) {
  switch (mode) {
    case ObservationMode::kFull:
    case ObservationMode::kInputOnly:
      return full.suite;
    case ObservationMode::kTdr:
      return tdr.suite;
    case ObservationMode::kObservationOnly: {
      TestSuite s;
      s.files = full.suite.files;
      for (const auto& t : full.suite.tests) {
        if (!t.generated) s.tests.push_back(t);
      }
      return s;
    }
  }
  return {};
}

std::optional<std::string> StageCache::load(const std::string& key, const std::string& name) const {
  if (!sealed(key)) return std::nullopt;
  auto p = root_ / key / name;
  if (!fs::is_regular_file(p)) return std::nullopt;
  return read_file(p);
}

void StageCache::store(const std::string& key, const std::string& name,
                       const std::string& content) const {
  write_file_if_changed(root_ / key / name, content);
}

void StageCache::seal(const std::string& key) const { write_file_if_changed(root_ / key / "done", "ok\n"); }

bool StageCache::sealed(const std::string& key) const {
  return fs::is_regular_file(root_ / key / "done");
}

StablePointSet stable_from_json(const std::string& text) {
  StablePointSet s;
  json j = json::parse(text);
  for (const auto& p : j.at("points")) {
    std::string id = p.at("point_id").get<std::string>();
    std::string status = p.at("status").get<std::string>();
    if (status == "discarded") {
      const auto& e = p.at("evidence");
      s.discarded[id] = DiscardEvidence{e.at("first_run"), e.at("other_run"), e.at("first_values"),
                                        e.at("other_values")};
    } else {
      s.stable.insert(id);
      if (status == "unexercised") s.unexercised.insert(id);
    }
    for (const auto& env : p.at("environments")) s.environments[id].insert(env.get<std::string>());
  }
  return s;
}

namespace {

ExecStats stats_from_json(const std::string& text) {
  json j = json::parse(text);
  ExecStats s;
  s.tests_declared = j.at("tests_declared");
  s.tests_executed = j.at("tests_executed");
  s.points_declared = j.at("points_declared");
  s.points_executed = j.at("points_executed");
  s.dropped_nonexecutable = j.at("dropped_nonexecutable");
  s.dropped = j.at("dropped").get<std::vector<std::string>>();
  s.failed = j.at("failed").get<std::vector<std::string>>();
  return s;
}

std::string key_of(std::initializer_list<std::string> parts) {
  std::uint64_t h = fnv1a("stage");
  for (const auto& p : parts) {
    h = fnv1a(p, h);
    h = fnv1a("\x1f", h);
  }
  return hex64(h);
}

json nullable(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }
json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fixed1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

struct ModeRun {
  ObservationMode mode;
  InstrumentedSuite inst;
  StablePointSet stable;
  ExecStats reference;
  std::vector<std::vector<TraceSet>> traces;  // [program][environment]
  int originals = 0;
  int covered_amplified = 0;
};

}  // namespace

std::string multiplier(int total, int originals) {
  if (originals <= 0) return "n/a";
  double r = std::round(10.0 * total / originals) / 10.0;
  return "×" + fixed1(r);
}

namespace {

std::vector<std::string> summary_lines(const json& r) {
  std::vector<std::string> lines;
  const json& t3 = r.at("table3");
  int v = t3.at("variants");
  lines.push_back("fixture " + r.at("fixture").get<std::string>() + ": " + std::to_string(v) +
                  (v == 1 ? " variant" : " variants"));
  for (const auto& row : r.at("table2")) {
    lines.push_back("amplification (" + row.at("mode").get<std::string>() +
                    "): " + std::to_string(row.at("originals").get<int>()) + " originals, " +
                    std::to_string(row.at("tests").get<int>()) + " tests (" +
                    row.at("multiplier").get<std::string>() + "), " +
                    std::to_string(row.at("points_declared").get<int>()) + " points, " +
                    std::to_string(row.at("discarded_points").get<int>()) + " discarded, " +
                    std::to_string(row.at("dropped_nonexecutable").get<int>()) + " non-executable");
  }
  if (v == 0) {
    lines.push_back("no pairs");
    return lines;
  }
  auto detected = [&](const char* count_key, const char* mean_key, const char* mode) {
    if (t3.at(count_key).is_null()) return;
    std::string line = std::to_string(t3.at(count_key).get<int>()) + "/" + std::to_string(v) +
                       " detected (" + mode + ")";
    if (!t3.at(mean_key).is_null()) {
      line += ", mean divergence " + fixed1(t3.at(mean_key).get<double>());
    }
    lines.push_back(line);
  };
  detected("detected_full", "mean_divergences_full", "FULL");
  detected("input_space_effect", "mean_divergences_input_only", "INPUT_ONLY");
  detected("observation_space_effect", "mean_divergences_observation_only", "OBSERVATION_ONLY");
  detected("detected_tdr", "mean_divergences_tdr", "TDR");
  for (const auto& o : r.at("oracle")) {
    std::string line = "oracle " + o.at("variant").get<std::string>() + ": " +
                       (o.at("diverse").get<bool>() ? "diverse" : "equivalent") + " over " +
                       std::to_string(o.at("probes").get<int>()) + " probes";
    if (!o.at("agrees").is_null()) {
      line += o.at("agrees").get<bool>() ? ", agrees with FULL" : ", disagrees with FULL";
    }
    lines.push_back(line);
  }
  return lines;
}

std::string csv_field(const json& v) {
  std::string s;
  if (v.is_null()) return "";
  if (v.is_string()) {
    s = v.get<std::string>();
  } else if (v.is_array()) {
    std::vector<std::string> parts;
    for (const auto& e : v) parts.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    s = join(parts, ";");
  } else {
    s = v.dump();
  }
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv(const std::vector<std::string>& cols, const std::vector<const json*>& rows) {
  std::string out = join(cols, ",") + "\n";
  for (const auto* row : rows) {
    std::vector<std::string> f;
    for (const auto& c : cols) f.push_back(csv_field(row->at(c)));
    out += join(f, ",") + "\n";
  }
  return out;
}

std::vector<std::string> schema_columns(const char* table, bool array) {
  json schema = json::parse(kReportSchema);
  const json& node = schema.at("properties").at(table);
  const json& obj = array ? node.at("items") : node;
  std::vector<std::string> cols;
  for (const auto& [k, v] : obj.at("properties").items()) {
    std::string t = v.contains("type") && v.at("type").is_string() ? v.at("type").get<std::string>() : "";
    if (t == "array" && v.at("items").contains("type") && v.at("items").at("type") == "object") continue;
    cols.push_back(k);
  }
  return cols;
}

void validate_node(const json& v, const json& s, const std::string& path,
                   std::vector<std::string>& problems) {
  if (s.contains("type")) {
    std::vector<std::string> types;
    if (s.at("type").is_array()) {
      for (const auto& t : s.at("type")) types.push_back(t);
    } else {
      types.push_back(s.at("type"));
    }
    bool ok = false;
    for (const auto& t : types) {
      if ((t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
          (t == "string" && v.is_string()) || (t == "boolean" && v.is_boolean()) ||
          (t == "null" && v.is_null()) || (t == "number" && v.is_number()) ||
          (t == "integer" && (v.is_number_integer() ||
                              (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())))) {
        ok = true;
      }
    }
    if (!ok) {
      problems.push_back(path + ": expected " + join(types, "|"));
      return;
    }
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s.at("enum")) found = found || e == v;
    if (!found) problems.push_back(path + ": value " + v.dump() + " not allowed");
  }
  if (s.contains("minimum") && v.is_number() && v.get<double>() < s.at("minimum").get<double>()) {
    problems.push_back(path + ": below minimum");
  }
  if (v.is_object()) {
    if (s.contains("required")) {
      for (const auto& r : s.at("required")) {
        if (!v.contains(r.get<std::string>())) problems.push_back(path + ": missing " + r.get<std::string>());
      }
    }
    const json* props = s.contains("properties") ? &s.at("properties") : nullptr;
    for (const auto& [k, child] : v.items()) {
      if (props && props->contains(k)) {
        validate_node(child, props->at(k), path + "." + k, problems);
      } else if (s.contains("additionalProperties") && s.at("additionalProperties") == false) {
        problems.push_back(path + ": unexpected property " + k);
      }
    }
  }
  if (v.is_array() && s.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      validate_node(v[i], s.at("items"), path + "[" + std::to_string(i) + "]", problems);
    }
  }
}

}  // namespace

std::vector<std::string> validate_report(const std::string& report_json) {
  std::vector<std::string> problems;
  json v;
  try {
    v = json::parse(report_json);
  } catch (const json::exception& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  validate_node(v, json::parse(kReportSchema), "$", problems);
  return problems;
}

std::string render_summary(const std::string& report_json) {
  json r = json::parse(report_json);
  std::string out;
  for (const auto& l : summary_lines(r)) out += l + "\n";
  return out;
}

std::string render_table2_csv(const std::string& report_json) {
  json r = json::parse(report_json);
  std::vector<const json*> rows;
  for (const auto& row : r.at("table2")) rows.push_back(&row);
  return csv(schema_columns("table2", true), rows);
}

std::string render_table3_csv(const std::string& report_json) {
  json r = json::parse(report_json);
  return csv(schema_columns("table3", false), {&r.at("table3")});
}

std::string render_pairs_csv(const std::string& report_json) {
  json r = json::parse(report_json);
  std::vector<const json*> rows;
  for (const auto& row : r.at("pairs")) rows.push_back(&row);
  return csv(schema_columns("pairs", true), rows);
}

void render_report(const fs::path& dir) {
  std::string text = read_file(dir / "report.json");
  auto problems = validate_report(text);
  if (!problems.empty()) {
    throw Error(ErrorCode::kConfigError, "report does not match the schema: " + problems.front());
  }
  write_file_if_changed(dir / "summary.txt", render_summary(text));
  write_file_if_changed(dir / "table2.csv", render_table2_csv(text));
  write_file_if_changed(dir / "table3.csv", render_table3_csv(text));
  write_file_if_changed(dir / "pairs.csv", render_pairs_csv(text));
}

namespace {

json pair_json(const DivergenceReport& rep) {
  json p;
  p["a"] = rep.program_a;
  p["b"] = rep.program_b;
  p["mode"] = std::string(to_string(rep.mode));
  p["count"] = rep.count;
  p["verdict"] = std::string(to_string(rep.verdict));
  p["environments"] = rep.environments;
  json dps = json::array();
  for (const auto& d : rep.diverging) {
    dps.push_back({{"point_id", d.point_id}, {"value_a", d.value_a}, {"value_b", d.value_b}});
  }
  p["diverging_points"] = dps;
  return p;
}

std::string trace_meta(const SuiteRun& r) {
  json j;
  j["program_id"] = r.trace.program_id;
  j["run_id"] = r.trace.run_id;
  j["environment"] = r.trace.environment;
  j["suite_digest"] = r.trace.suite_digest;
  j["stats"] = json::parse(stats_json(r.stats));
  return j.dump(2) + "\n";
}

// Runs (or reloads) the traces of every program in every environment.
std::vector<std::vector<TraceSet>> run_programs(const PipelineConfig& cfg, const StageCache& cache,
                                                const InstrumentedSuite& inst,
                                                const std::vector<const Program*>& programs,
                                                const RunOptions& opts) {
  const std::string sdigest = suite_digest(inst.suite);
  std::vector<std::vector<TraceSet>> traces(programs.size(),
                                            std::vector<TraceSet>(cfg.environments));
  std::vector<Job> jobs;
  std::vector<std::pair<std::size_t, int>> where;
  std::vector<std::string> keys;
  for (std::size_t p = 0; p < programs.size(); ++p) {
    for (int e = 0; e < cfg.environments; ++e) {
      std::string key = "run-" + key_of({programs[p]->id, programs[p]->digest(), sdigest,
                                         std::to_string(e), std::to_string(opts.timeout.count())});
      auto meta = cache.load(key, "meta.json");
      auto tsv = cache.load(key, "trace.tsv");
      if (meta && tsv) {
        TraceSet t = parse_trace(*tsv);
        json m = json::parse(*meta);
        t.program_id = m.at("program_id");
        t.run_id = m.at("run_id");
        t.environment = m.at("environment");
        t.suite_digest = m.at("suite_digest");
        traces[p][e] = std::move(t);
        continue;
      }
      Job j;
      j.suite = &inst.suite;
      j.points_declared = static_cast<int>(inst.points.size());
      j.program = programs[p];
      j.env = perturb_environment(EnvironmentPerturbation{}, e);
      j.run_id = "detect";
      jobs.push_back(std::move(j));
      where.emplace_back(p, e);
      keys.push_back(key);
    }
  }
  LocalRunner runner;
  auto results = cfg.workers == 1 ? run_jobs_serial(runner, jobs, opts)
                                  : run_jobs_parallel(runner, jobs, opts, cfg.workers);
  for (std::size_t i = 0; i < results.size(); ++i) {
    cache.store(keys[i], "trace.tsv", format_trace(results[i].trace));
    cache.store(keys[i], "meta.json", trace_meta(results[i]));
    cache.seal(keys[i]);
    traces[where[i].first][where[i].second] = std::move(results[i].trace);
  }
  return traces;
}

DivergenceReport compare_all_envs(const ModeRun& mr, std::size_t a, std::size_t b) {
  std::vector<DivergenceReport> per_env;
  for (std::size_t e = 0; e < mr.traces[a].size(); ++e) {
    per_env.push_back(compare(mr.traces[a][e], mr.traces[b][e], mr.stable, mr.mode));
  }
  return combine_environments(per_env);
}

}  // namespace

DetectResult detect(const PipelineConfig& cfg_in) {
  PipelineConfig cfg = cfg_in;
  cfg.resolve();
  const std::uint64_t seed = cfg.require_seed();
  const RunOptions opts = cfg.run_options();
  Fixture fx = load_fixture(cfg.corpus);

  build_program(fx.original);
  for (const auto& v : fx.variants) build_program(v);
  std::string why;
  if (!suite_passes(fx.suite, fx.original, opts, &why)) {
    throw Error(ErrorCode::kOriginalSuiteRed, fx.name + ": " + why);
  }

  bool want_tdr = std::count(cfg.modes.begin(), cfg.modes.end(), ObservationMode::kTdr) > 0;
  AmplifiedSuite full = amplify(fx.suite, seed);
  AmplifiedSuite tdr;
  if (want_tdr) tdr = tdr_amplify(fx.suite, cfg.tdr_level);
  write_ats(full, cfg.out / "ats" / "amplified");
  if (want_tdr) write_ats(tdr, cfg.out / "ats" / "tdr");

  AccessorCatalog catalog = build_catalog(fx.original.units);
  StageCache cache(cfg.out / "stages");
  std::vector<const Program*> programs = {&fx.original};
  for (const auto& v : fx.variants) programs.push_back(&v);

  const int statements = static_cast<int>(statement_sites(fx.original.units).size());
  const int covered_original = static_cast<int>(measure_coverage(fx.suite, fx.original, opts).size());

  std::vector<ModeRun> runs;
  for (auto mode : cfg.modes) {
    ModeRun mr;
    mr.mode = mode;
    mr.inst = instrument_suite(mode_suite(mode, full, tdr), catalog, mode);
    for (const auto& t : mr.inst.suite.tests) mr.originals += t.generated ? 0 : 1;
    render_tests(mr.inst.suite, cfg.out / "ats" / mode_key(mode) / "tests");

    const std::string sdigest = suite_digest(mr.inst.suite);
    std::string cal_key = "calibrate-" + key_of({fx.original.digest(), sdigest,
                                                 std::to_string(cfg.runs),
                                                 std::to_string(cfg.environments),
                                                 std::to_string(opts.timeout.count())});
    auto cal = cache.load(cal_key, "calibration.json");
    auto ref = cache.load(cal_key, "stats.json");
    if (cal && ref) {
      mr.stable = stable_from_json(*cal);
      mr.reference = stats_from_json(*ref);
    } else {
      CalibrationConfig cc;
      cc.runs_per_environment = cfg.runs;
      cc.environments = cfg.environments;
      LocalRunner runner;
      mr.stable = cfg.workers == 1
                      ? calibrate_serial(mr.inst, fx.original, cc, runner, opts)
                      : calibrate_parallel(mr.inst, fx.original, cc, runner, opts, cfg.workers);
      mr.reference = mr.stable.reference_stats;
      cache.store(cal_key, "calibration.json", calibration_json(mr.stable, mr.inst));
      cache.store(cal_key, "stats.json", stats_json(mr.reference));
      cache.seal(cal_key);
    }
    std::string cov_key = "coverage-" + key_of({fx.original.digest(), sdigest,
                                                std::to_string(opts.timeout.count())});
    if (auto c = cache.load(cov_key, "covered.txt")) {
      mr.covered_amplified = std::stoi(*c);
    } else {
      mr.covered_amplified = static_cast<int>(measure_coverage(mr.inst.suite, fx.original, opts).size());
      cache.store(cov_key, "covered.txt", std::to_string(mr.covered_amplified) + "\n");
      cache.seal(cov_key);
    }
    mr.traces = run_programs(cfg, cache, mr.inst, programs, opts);
    if (mode == ObservationMode::kFull) full.dropped_nonexecutable = mr.reference.dropped_nonexecutable;
    runs.push_back(std::move(mr));
  }

  json report;
  report["fixture"] = fx.name;
  report["seed"] = seed;
  json modes = json::array();
  for (auto m : cfg.modes) modes.push_back(std::string(to_string(m)));
  report["config"] = {{"runs", cfg.runs},
                      {"environments", cfg.environments},
                      {"modes", modes},
                      {"tdr_level", cfg.tdr_level},
                      {"timeout_ms", cfg.timeout.count()}};

  json table2 = json::array();
  json pairs = json::array();
  json discarded = json::array();
  std::map<ObservationMode, std::vector<DivergenceReport>> by_mode;
  std::optional<double> all_pairs_full;
  for (const auto& mr : runs) {
    const int tests = static_cast<int>(mr.inst.suite.tests.size());
    json row;
    row["mode"] = std::string(to_string(mr.mode));
    row["tests"] = tests;
    row["originals"] = mr.originals;
    row["multiplier"] = multiplier(tests, mr.originals);
    row["tests_executed"] = mr.reference.tests_executed;
    row["points_declared"] = static_cast<int>(mr.inst.points.size());
    row["points_executed"] = mr.reference.points_executed;
    row["discarded_points"] = static_cast<int>(mr.stable.discarded.size());
    row["unexercised_points"] = static_cast<int>(mr.stable.unexercised.size());
    row["dropped_nonexecutable"] = mr.reference.dropped_nonexecutable;
    row["statements"] = statements;
    row["covered_original"] = covered_original;
    row["covered_amplified"] = mr.covered_amplified;
    table2.push_back(std::move(row));
    for (const auto& [id, _] : mr.stable.discarded) {
      discarded.push_back({{"mode", std::string(to_string(mr.mode))}, {"point_id", id}});
    }
    for (std::size_t v = 1; v < programs.size(); ++v) {
      DivergenceReport rep = compare_all_envs(mr, 0, v);
      pairs.push_back(pair_json(rep));
      by_mode[mr.mode].push_back(std::move(rep));
    }
    if (mr.mode == ObservationMode::kFull && programs.size() >= 2) {
      std::vector<DivergenceReport> all;
      for (std::size_t a = 0; a < programs.size(); ++a) {
        for (std::size_t b = a + 1; b < programs.size(); ++b) all.push_back(compare_all_envs(mr, a, b));
      }
      all_pairs_full = mean_divergence(all);
    }
  }
  report["table2"] = table2;

  const int nvariants = static_cast<int>(fx.variants.size());
  auto detected = [&](ObservationMode m) -> std::optional<int> {
    if (!std::count(cfg.modes.begin(), cfg.modes.end(), m)) return std::nullopt;
    int n = 0;
    for (const auto& r : by_mode[m]) n += r.verdict == Verdict::kNvpDiverse ? 1 : 0;
    return n;
  };
  auto mean = [&](ObservationMode m) -> std::optional<double> {
    if (!std::count(cfg.modes.begin(), cfg.modes.end(), m) || by_mode[m].empty()) return std::nullopt;
    return mean_divergence(by_mode[m]);
  };
  std::optional<int> either;
  bool have_in = std::count(cfg.modes.begin(), cfg.modes.end(), ObservationMode::kInputOnly) > 0;
  bool have_obs = std::count(cfg.modes.begin(), cfg.modes.end(), ObservationMode::kObservationOnly) > 0;
  if (have_in || have_obs) {
    int n = 0;
    for (int v = 0; v < nvariants; ++v) {
      bool hit = (have_in && by_mode[ObservationMode::kInputOnly][v].count > 0) ||
                 (have_obs && by_mode[ObservationMode::kObservationOnly][v].count > 0);
      n += hit ? 1 : 0;
    }
    either = n;
  }
  json t3;
  t3["variants"] = nvariants;
  t3["detected_full"] = nullable(detected(ObservationMode::kFull));
  t3["input_space_effect"] = nullable(detected(ObservationMode::kInputOnly));
  t3["observation_space_effect"] = nullable(detected(ObservationMode::kObservationOnly));
  t3["detected_either"] = nullable(either);
  t3["detected_tdr"] = nullable(detected(ObservationMode::kTdr));
  t3["mean_divergences_full"] = nullable(mean(ObservationMode::kFull));
  t3["mean_divergences_input_only"] = nullable(mean(ObservationMode::kInputOnly));
  t3["mean_divergences_observation_only"] = nullable(mean(ObservationMode::kObservationOnly));
  t3["mean_divergences_tdr"] = nullable(mean(ObservationMode::kTdr));
  t3["mean_divergences_all_pairs_full"] = nullable(all_pairs_full);
  report["table3"] = t3;
  report["pairs"] = pairs;
  report["discarded_points"] = discarded;

  json oracle = json::array();
  if (cfg.oracle && nvariants > 0) {
    std::vector<std::string> parts = {fx.original.digest()};
    for (const auto& v : fx.variants) parts.push_back(v.id + ":" + v.digest());
    std::uint64_t h = fnv1a("oracle");
    for (const auto& p : parts) h = fnv1a(p, h);
    std::string key = "oracle-" + hex64(h);
    std::string gt;
    if (auto c = cache.load(key, "ground_truth.json")) {
      gt = *c;
    } else {
      std::vector<const Program*> vs(programs.begin() + 1, programs.end());
      gt = ground_truth_json(oracle_label(fx.original, vs, opts));
      cache.store(key, "ground_truth.json", gt);
      cache.seal(key);
    }
    json g = json::parse(gt);
    bool have_full = detected(ObservationMode::kFull).has_value();
    for (std::size_t i = 0; i < g.at("variants").size(); ++i) {
      const json& e = g.at("variants")[i];
      json o;
      o["variant"] = e.at("variant");
      o["diverse"] = e.at("diverse");
      o["probes"] = e.at("probes");
      if (have_full) {
        bool full_diverse = by_mode[ObservationMode::kFull][i].verdict == Verdict::kNvpDiverse;
        o["full_verdict"] = full_diverse ? "NVP_DIVERSE" : "NOT_DETECTED";
        o["agrees"] = full_diverse == e.at("diverse").get<bool>();
      } else {
        o["full_verdict"] = nullptr;
        o["agrees"] = nullptr;
      }
      oracle.push_back(std::move(o));
    }
  }
  report["oracle"] = oracle;
  report["summary"] = {{"no_pairs", nvariants == 0}, {"lines", json::array()}};
  report["summary"]["lines"] = summary_lines(report);

  DetectResult out;
  out.report_json = report.dump(2) + "\n";
  auto problems = validate_report(out.report_json);
  if (!problems.empty()) {
    throw Error(ErrorCode::kExecutionError, "report violates its schema: " + join(problems, "; "));
  }
  fs::path dir = cfg.out / "report";
  write_file_if_changed(dir / "report.json", out.report_json);
  render_report(dir);
  std::error_code ec;
  fs::remove_all(opts.scratch, ec);
  return out;
}

}  // namespace nvamp
