#include "nvamp/divergence.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "nvamp/errors.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

std::string_view to_string(Verdict v) {
  return v == Verdict::kNvpDiverse ? "NVP_DIVERSE" : "NOT_DETECTED";
}

namespace {

using Sequences = std::unordered_map<std::string, std::vector<std::string>>;

Sequences sequences_of(const TraceSet& t) {
  Sequences out;
  for (const auto& test : t.tests) {
    for (const auto& r : test.records) out[r.point_id].push_back(r.value);
  }
  return out;
}

std::string show(const Sequences& s, const std::string& id) {
  auto it = s.find(id);
  if (it == s.end() || it->second.empty()) return "<absent>";
  return join(it->second, " | ");
}

}  // namespace

DivergenceReport compare(const TraceSet& a, const TraceSet& b, const StablePointSet& stable,
                         ObservationMode mode) {
  if (a.suite_digest != b.suite_digest) {
    throw Error(ErrorCode::kTraceMismatch, "traces of " + a.program_id + " and " + b.program_id +
                                               " come from different suites");
  }
  if (a.environment != b.environment) {
    throw Error(ErrorCode::kTraceMismatch, "traces come from environments " + a.environment +
                                               " and " + b.environment);
  }
  Sequences sa = sequences_of(a);
  Sequences sb = sequences_of(b);
  static const std::vector<std::string> kNone;
  auto seq = [&](const Sequences& s, const std::string& id) -> const std::vector<std::string>& {
    auto it = s.find(id);
    return it == s.end() ? kNone : it->second;
  };

  DivergenceReport rep;
  rep.program_a = a.program_id;
  rep.program_b = b.program_id;
  rep.mode = mode;
  rep.environments = {a.environment};
  for (const auto& id : stable.stable) {
    if (seq(sa, id) != seq(sb, id)) rep.diverging.push_back({id, show(sa, id), show(sb, id)});
  }
  rep.count = static_cast<int>(rep.diverging.size());
  rep.verdict = rep.count >= 1 ? Verdict::kNvpDiverse : Verdict::kNotDetected;
  return rep;
}

DivergenceReport combine_environments(const std::vector<DivergenceReport>& per_env) {
  if (per_env.empty()) throw Error(ErrorCode::kEmptySet, "no environments to combine");
  DivergenceReport out = per_env.front();
  out.diverging.clear();
  out.environments.clear();
  std::map<std::string, DivergingPoint> merged;
  for (const auto& r : per_env) {
    for (const auto& e : r.environments) out.environments.push_back(e);
    for (const auto& d : r.diverging) merged.emplace(d.point_id, d);
  }
  for (auto& [_, d] : merged) out.diverging.push_back(std::move(d));
  out.count = static_cast<int>(out.diverging.size());
  out.verdict = out.count >= 1 ? Verdict::kNvpDiverse : Verdict::kNotDetected;
  return out;
}

double mean_divergence(const std::vector<DivergenceReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptySet, "no variant pairs");
  double sum = 0;
  for (const auto& r : reports) sum += r.count;
  return sum / static_cast<double>(reports.size());
}

std::map<ObservationMode, DivergenceReport> ablate(
    const std::map<ObservationMode, ModeTraces>& inputs) {
  std::map<ObservationMode, DivergenceReport> out;
  for (const auto& [mode, t] : inputs) {
    if (!t.stable) throw Error(ErrorCode::kConfigError, "no stable point set for a mode");
    out[mode] = compare(t.a, t.b, *t.stable, mode);
  }
  return out;
}

}  // namespace nvamp
