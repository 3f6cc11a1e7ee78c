#include "nvamp/flake_filter.hpp"

#include <omp.h>

#include <array>
#include <exception>
#include <unordered_map>

#include "json.hpp"
#include "nvamp/errors.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

void CalibrationConfig::validate() const {
  if (runs_per_environment < 2) {
    throw Error(ErrorCode::kConfigError, "calibration needs at least 2 runs per environment");
  }
  if (environments < 1) {
    throw Error(ErrorCode::kConfigError, "calibration needs at least 1 environment");
  }
}

EnvironmentPerturbation perturb_environment(const EnvironmentPerturbation& base, int index) {
  if (index == 0) return base;
  static const std::array<const char*, 4> kLocales = {"C.UTF-8", "en_US.UTF-8", "fr_FR.UTF-8",
                                                      "de_DE.UTF-8"};
  static const std::array<const char*, 4> kZones = {"UTC", "America/New_York", "Europe/Paris",
                                                    "Asia/Tokyo"};
  EnvironmentPerturbation env = base;
  std::string tag = "perturb-" + std::to_string(index);
  env.index = index;
  env.visible_workdir = base.visible_workdir / tag;
  env.locale = kLocales[index % 4];
  env.timezone = kZones[index % 4];
  env.vars["NVAMP_ENV_INDEX"] = std::to_string(index);
  env.vars["HOME"] = "/home/" + tag;
  env.vars["TMPDIR"] = (env.visible_workdir / "tmp").string();
  env.vars["LANG"] = env.locale;
  env.vars["LC_ALL"] = env.locale;
  env.vars["TZ"] = env.timezone;
  return env;
}

namespace {

using Sequences = std::unordered_map<std::string, std::vector<std::string>>;

Sequences sequences_of(const TraceSet& run) {
  Sequences out;
  for (const auto& t : run.tests) {
    for (const auto& r : t.records) out[r.point_id].push_back(r.value);
  }
  return out;
}

std::string show(const std::vector<std::string>* seq) {
  if (!seq || seq->empty()) return "<absent>";
  return join(*seq, " | ");
}

}  // namespace

StablePointSet classify_points(const std::vector<std::string>& declared,
                               const std::vector<TraceSet>& runs) {
  StablePointSet out;
  std::vector<Sequences> seqs;
  seqs.reserve(runs.size());
  for (const auto& r : runs) seqs.push_back(sequences_of(r));

  std::set<std::string> universe(declared.begin(), declared.end());
  for (const auto& s : seqs) {
    for (const auto& [id, _] : s) universe.insert(id);
  }
  for (const auto& id : universe) {
    const std::vector<std::string>* first = nullptr;
    bool exercised = false;
    bool varies = false;
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      auto it = seqs[k].find(id);
      const std::vector<std::string>* cur = it == seqs[k].end() ? nullptr : &it->second;
      if (cur) {
        exercised = true;
        out.environments[id].insert(runs[k].environment);
      }
      if (k == 0) {
        first = cur;
        continue;
      }
      bool same = (!first && !cur) || (first && cur && *first == *cur);
      if (!same && !varies) {
        varies = true;
        out.discarded[id] = DiscardEvidence{runs[0].run_id, runs[k].run_id, show(first), show(cur)};
      }
    }
    if (varies) continue;
    out.stable.insert(id);
    if (!exercised) out.unexercised.insert(id);
  }
  return out;
}

namespace {

std::vector<std::string> declared_ids(const InstrumentedSuite& ats) {
  std::vector<std::string> ids;
  for (const auto& p : ats.points) ids.push_back(p.point_id);
  return ids;
}

Job calibration_job(const InstrumentedSuite& ats, const Program& original,
                    const CalibrationConfig& cfg, int env, int run) {
  Job j;
  j.suite = &ats.suite;
  j.points_declared = static_cast<int>(ats.points.size());
  j.program = &original;
  j.env = perturb_environment(cfg.base, env);
  j.run_id = "cal-e" + std::to_string(env) + "-r" + std::to_string(run);
  return j;
}

StablePointSet finish(const InstrumentedSuite& ats, std::vector<SuiteRun>& results) {
  std::vector<TraceSet> traces;
  traces.reserve(results.size());
  for (auto& r : results) traces.push_back(std::move(r.trace));
  StablePointSet out = classify_points(declared_ids(ats), traces);
  if (!results.empty()) out.reference_stats = results.front().stats;
  return out;
}

}  // namespace

StablePointSet calibrate_serial(const InstrumentedSuite& ats, const Program& original,
                                const CalibrationConfig& cfg, Runner& runner,
                                const RunOptions& opts) {
  cfg.validate();
  std::vector<SuiteRun> results;
  for (int e = 0; e < cfg.environments; ++e) {
    for (int r = 0; r < cfg.runs_per_environment; ++r) {
      results.push_back(runner.run(calibration_job(ats, original, cfg, e, r), opts));
    }
  }
  return finish(ats, results);
}

StablePointSet calibrate_parallel(const InstrumentedSuite& ats, const Program& original,
                                  const CalibrationConfig& cfg, Runner& runner,
                                  const RunOptions& opts, int workers) {
  cfg.validate();
  const int envs = cfg.environments;
  const int runs = cfg.runs_per_environment;
  std::vector<SuiteRun> results(static_cast<std::size_t>(envs) * runs);
  std::vector<std::exception_ptr> errors(envs);
  int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int e = 0; e < envs; ++e) {
    try {
      for (int r = 0; r < runs; ++r) {
        results[static_cast<std::size_t>(e) * runs + r] =
            runner.run(calibration_job(ats, original, cfg, e, r), opts);
      }
    } catch (...) {
      errors[e] = std::current_exception();
    }
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return finish(ats, results);
}

std::string calibration_json(const StablePointSet& set, const InstrumentedSuite& ats) {
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const auto& p : ats.points) {
    nlohmann::ordered_json j;
    j["point_id"] = p.point_id;
    j["source"] = std::string(to_string(p.source));
    auto d = set.discarded.find(p.point_id);
    if (d != set.discarded.end()) {
      j["status"] = "discarded";
      j["evidence"] = {{"first_run", d->second.first_run},
                       {"other_run", d->second.other_run},
                       {"first_values", d->second.first_values},
                       {"other_values", d->second.other_values}};
    } else {
      j["status"] = set.unexercised.count(p.point_id) ? "unexercised" : "stable";
    }
    auto env = set.environments.find(p.point_id);
    j["environments"] = env == set.environments.end() ? std::vector<std::string>{}
                                                      : std::vector<std::string>(env->second.begin(),
                                                                                 env->second.end());
    points.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["stable"] = set.stable.size();
  root["discarded"] = set.discarded.size();
  root["unexercised"] = set.unexercised.size();
  root["points"] = std::move(points);
  return root.dump(2) + "\n";
}

}  // namespace nvamp
