#include "nvamp/forge.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "json.hpp"
#include "nvamp/errors.hpp"
#include "nvamp/lang/printer.hpp"
#include "nvamp/observer.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

using lang::Expr;
using lang::ExprKind;
using lang::Stmt;
using lang::Value;

std::string_view to_string(SteroidKind k) {
  switch (k) {
    case SteroidKind::kAdd: return "add";
    case SteroidKind::kDelete: return "delete";
    case SteroidKind::kReplace: return "replace";
  }
  return "?";
}

SteroidKind parse_steroid_kind(const std::string& s) {
  if (s == "add") return SteroidKind::kAdd;
  if (s == "delete") return SteroidKind::kDelete;
  if (s == "replace") return SteroidKind::kReplace;
  throw Error(ErrorCode::kConfigError, "unknown transformation kind: " + s);
}

namespace {

void rename(Stmt& s, const std::map<std::string, std::string>& bindings) {
  auto fix = [&](Expr& root) {
    lang::walk_exprs(root, [&](Expr& e) {
      if (e.kind != ExprKind::kName) return;
      auto it = bindings.find(e.text);
      if (it != bindings.end()) e.text = it->second;
    });
  };
  lang::walk_own_exprs(s, fix);
  for (auto& b : s.body) rename(b, bindings);
  for (auto& a : s.alt) rename(a, bindings);
}

const ScopedVar* lookup(const std::vector<ScopedVar>& scope, const std::string& name) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
    if (it->name == name) return &*it;
  }
  return nullptr;
}

const StatementSite& site_at(const std::vector<StatementSite>& sites, int id) {
  if (id < 0 || id >= static_cast<int>(sites.size())) {
    throw Error(ErrorCode::kConfigError, "no statement with id " + std::to_string(id));
  }
  return sites[id];
}

}  // namespace

std::vector<TransplantCandidate> enumerate_transplants(const Program& program, int point) {
  auto sites = statement_sites(program.units);
  const StatementSite& at = site_at(sites, point);
  std::vector<TransplantCandidate> out;
  for (const auto& t : sites) {
    TransplantCandidate c;
    c.transplant = t.id;
    bool ok = true;
    for (const auto& name : free_variables(*t.stmt)) {
      const ScopedVar* own = lookup(t.scope, name);
      if (!own) {
        ok = false;
        break;
      }
      const ScopedVar* same = lookup(at.scope, name);
      if (same && same->type == own->type) {
        c.bindings[name] = name;
        continue;
      }
      const ScopedVar* pick = nullptr;
      for (auto it = at.scope.rbegin(); it != at.scope.rend(); ++it) {
        if (it->type == own->type) {
          pick = &*it;
          break;
        }
      }
      if (!pick) {
        ok = false;
        break;
      }
      c.bindings[name] = pick->name;
    }
    if (!ok) continue;
    Stmt bound = *t.stmt;
    rename(bound, c.bindings);
    c.identity = bound == *at.stmt;
    out.push_back(std::move(c));
  }
  return out;
}

Program apply_steroid(const Program& program, SteroidKind kind, int point,
                      const TransplantCandidate* candidate, const std::string& variant_id) {
  Program out = program;
  out.id = variant_id;
  std::optional<Stmt> bound;
  if (kind != SteroidKind::kDelete) {
    if (!candidate) throw Error(ErrorCode::kConfigError, "transplant required");
    auto sites = statement_sites(program.units);
    bound = *site_at(sites, candidate->transplant).stmt;
    rename(*bound, candidate->bindings);
  }
  bool found = edit_statement(out.units, point, [&](std::vector<Stmt>& list, std::size_t i) {
    switch (kind) {
      case SteroidKind::kAdd:
        list.insert(list.begin() + static_cast<long>(i) + 1, *bound);
        break;
      case SteroidKind::kDelete:
        list.erase(list.begin() + static_cast<long>(i));
        break;
      case SteroidKind::kReplace:
        list[i] = *bound;
        break;
    }
  });
  if (!found) throw Error(ErrorCode::kConfigError, "no statement with id " + std::to_string(point));
  return out;
}

bool suite_passes(const TestSuite& suite, const Program& program, const RunOptions& opts,
                  std::string* detail) {
  SuiteRun run;
  try {
    run = run_suite(suite, 0, program, EnvironmentPerturbation{}, "check", opts);
  } catch (const Error& e) {
    if (detail) *detail = e.what();
    return false;
  }
  if (run.stats.dropped_nonexecutable > 0) {
    if (detail) *detail = "not executable: " + run.stats.dropped.front();
    return false;
  }
  if (!run.stats.failed.empty()) {
    if (detail) *detail = "failing: " + run.stats.failed.front();
    return false;
  }
  return true;
}

namespace {

struct Sample {
  int point = 0;
  std::optional<TransplantCandidate> candidate;
};

VariantDescriptor check_sample(const Program& program, const TestSuite& suite, SteroidKind kind,
                               const Sample& s, const std::set<int>& covered,
                               const std::string& id, const RunOptions& opts) {
  VariantDescriptor v;
  v.id = id;
  v.kind = kind;
  v.point = s.point;
  if (s.candidate) {
    v.transplant = s.candidate->transplant;
    v.bindings = s.candidate->bindings;
    v.identity = s.candidate->identity;
  }
  v.patched = apply_steroid(program, kind, s.point, s.candidate ? &*s.candidate : nullptr, id);
  v.check.covered = covered.count(s.point) > 0;
  if (!v.check.covered) {
    v.check.detail = "transplantation point not covered";
    return v;
  }
  try {
    build_program(v.patched);
    v.check.builds = true;
  } catch (const Error& e) {
    v.check.detail = e.what();
    return v;
  }
  v.check.passes = suite_passes(suite, v.patched, opts, &v.check.detail);
  v.check.is_sosie = v.check.covered && v.check.passes;
  return v;
}

}  // namespace

ForgeResult synthesize(const Program& program, const TestSuite& suite, SteroidKind kind,
                       int budget, std::uint64_t seed, const RunOptions& opts, int workers) {
  if (budget < 0) throw Error(ErrorCode::kConfigError, "budget must be non-negative");
  build_program(program);
  std::string why;
  if (!suite_passes(suite, program, opts, &why)) {
    throw Error(ErrorCode::kOriginalSuiteRed, program.id + ": " + why);
  }
  std::set<int> covered = measure_coverage(suite, program, opts);

  auto sites = statement_sites(program.units);
  std::vector<Sample> space;
  for (const auto& site : sites) {
    if (kind == SteroidKind::kDelete) {
      space.push_back({site.id, std::nullopt});
      continue;
    }
    for (auto& c : enumerate_transplants(program, site.id)) space.push_back({site.id, std::move(c)});
  }
  auto rng = derive_rng(seed, "forge/" + std::string(to_string(kind)));
  deterministic_shuffle(space, rng);
  if (static_cast<int>(space.size()) > budget) space.resize(budget);

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < space.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%03zu", std::string(to_string(kind)).c_str(), i);
    ids.emplace_back(buf);
  }

  std::vector<VariantDescriptor> checked(space.size());
  const long n = static_cast<long>(space.size());
  if (workers == 1) {
    for (long i = 0; i < n; ++i) {
      checked[i] = check_sample(program, suite, kind, space[i], covered, ids[i], opts);
    }
  } else {
    std::vector<std::exception_ptr> errors(space.size());
    int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long i = 0; i < n; ++i) {
      try {
        checked[i] = check_sample(program, suite, kind, space[i], covered, ids[i], opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ForgeResult out;
  out.sampled = static_cast<int>(checked.size());
  for (auto& v : checked) {
    if (!v.check.covered) {
      ++out.rejected_uncovered;
    } else if (!v.check.builds) {
      ++out.rejected_build;
    } else if (!v.check.passes) {
      ++out.rejected_failing;
    } else {
      // post-check: the accepted variant is re-run from scratch
      if (!suite_passes(suite, v.patched, opts, &v.check.detail)) {
        throw Error(ErrorCode::kExecutionError, "post-check failed for " + v.id);
      }
      out.accepted.push_back(std::move(v));
    }
  }
  return out;
}

const std::vector<std::int32_t>& oracle_int_grid() {
  static const std::vector<std::int32_t> g = {std::numeric_limits<std::int32_t>::min(),
                                              -65537, -1, 0, 1, 2, 7, 65537,
                                              std::numeric_limits<std::int32_t>::max()};
  return g;
}

const std::vector<double>& oracle_double_grid() {
  static const std::vector<double> g = {-1.5, 0.0, 0.5, 1e9, std::nan("")};
  return g;
}

const std::vector<std::string>& oracle_string_grid() {
  static const std::vector<std::string> g = {"", "a", "zz", "a/b", "hello.txt", " ", "ALPHA",
                                             "alpha!"};
  return g;
}

namespace {

constexpr std::size_t kMaxTuplesPerMethod = 4096;

std::vector<Value> grid_for(const std::string& type) {
  std::vector<Value> out;
  if (type == "int") {
    for (auto v : oracle_int_grid()) out.push_back(Value::int32(v));
  } else if (type == "long") {
    for (auto v : oracle_int_grid()) out.push_back(Value::int64(v));
  } else if (type == "double") {
    for (auto v : oracle_double_grid()) out.push_back(Value::dbl(v));
  } else if (type == "boolean") {
    out = {Value::boolean(true), Value::boolean(false)};
  } else if (type == "String") {
    for (const auto& v : oracle_string_grid()) out.push_back(Value::str(v));
  }
  return out;
}

struct Probe {
  std::string cls;
  std::size_t ctor_arity = 0;
  bool has_receiver = true;
  std::string method;
  std::vector<Value> ctor_args;
  std::vector<Value> args;
  std::string label;
};

std::string show_args(lang::Interpreter& ip, const std::vector<Value>& args) {
  std::vector<std::string> parts;
  for (const auto& a : args) parts.push_back(ip.render(a));
  return "(" + join(parts, ", ") + ")";
}

// Cartesian product of per-parameter grids, capped, in odometer order.
std::vector<std::vector<Value>> tuples(const std::vector<std::vector<Value>>& grids) {
  std::vector<std::vector<Value>> out;
  for (const auto& g : grids) {
    if (g.empty()) return out;
  }
  std::vector<std::size_t> idx(grids.size(), 0);
  while (out.size() < kMaxTuplesPerMethod) {
    std::vector<Value> t;
    for (std::size_t i = 0; i < grids.size(); ++i) t.push_back(grids[i][idx[i]]);
    out.push_back(std::move(t));
    std::size_t k = 0;
    while (k < grids.size() && ++idx[k] == grids[k].size()) idx[k++] = 0;
    if (k == grids.size()) break;
  }
  return out;
}

std::vector<Probe> plan_probes(const Program& original) {
  std::vector<Probe> probes;
  for (const auto& u : original.units) {
    for (const auto& cls : u.classes) {
      std::vector<const lang::Method*> ctors;
      for (const auto& m : cls.methods) {
        if (m.is_ctor && m.is_public) ctors.push_back(&m);
      }
      bool has_ctor = std::any_of(cls.methods.begin(), cls.methods.end(),
                                  [](const auto& m) { return m.is_ctor; });
      for (const auto& m : cls.methods) {
        if (m.is_ctor || !m.is_public) continue;
        std::vector<std::vector<Value>> method_grids;
        for (const auto& p : m.params) method_grids.push_back(grid_for(p.type));
        std::vector<std::vector<const lang::Param*>> ctor_options;
        if (m.is_static) {
          ctor_options.push_back({});
        } else if (!has_ctor) {
          ctor_options.push_back({});
        } else {
          for (const auto* c : ctors) {
            std::vector<const lang::Param*> ps;
            for (const auto& p : c->params) ps.push_back(&p);
            ctor_options.push_back(ps);
          }
        }
        for (const auto& cps : ctor_options) {
          std::vector<std::vector<Value>> grids;
          for (const auto* p : cps) grids.push_back(grid_for(p->type));
          grids.insert(grids.end(), method_grids.begin(), method_grids.end());
          for (auto& t : tuples(grids)) {
            Probe pr;
            pr.cls = cls.name;
            pr.ctor_arity = cps.size();
            pr.has_receiver = !m.is_static;
            pr.method = m.name;
            pr.ctor_args.assign(t.begin(), t.begin() + static_cast<long>(cps.size()));
            pr.args.assign(t.begin() + static_cast<long>(cps.size()), t.end());
            probes.push_back(std::move(pr));
          }
        }
      }
    }
  }
  return probes;
}

std::string outcome(std::string_view what, const std::function<std::string()>& fn) {
  try {
    return fn();
  } catch (const lang::LangException& e) {
    return std::string(what) + "<throws: " + e.describe() + ">";
  } catch (const Error& e) {
    return std::string(what) + (e.code() == ErrorCode::kExecutionError ? "<timeout>" : "<broken>");
  }
}

std::string run_probe(const std::shared_ptr<const lang::Image>& image, const Probe& pr,
                      const AccessorCatalog& catalog, const std::filesystem::path& workdir,
                      const RunOptions& opts, std::string* label) {
  lang::HostEnvironment host;
  host.workdir = workdir;
  host.visible_workdir = "/work/oracle";
  std::error_code ec;
  std::filesystem::remove_all(workdir, ec);
  std::filesystem::create_directories(workdir, ec);
  lang::Interpreter ip(image, host, opts.timeout);
  if (label) {
    *label = pr.cls + (pr.has_receiver ? show_args(ip, pr.ctor_args) : std::string()) + "." +
             pr.method + show_args(ip, pr.args);
  }
  Value receiver;
  if (pr.has_receiver) {
    try {
      receiver = ip.construct(pr.cls, pr.ctor_args);
    } catch (const lang::LangException& e) {
      return "new <throws: " + e.describe() + ">";
    } catch (const Error& e) {
      return e.code() == ErrorCode::kExecutionError ? "new <timeout>" : "new <broken>";
    }
  }
  std::string out = outcome("", [&] {
    Value r = pr.has_receiver ? ip.invoke(receiver, pr.method, pr.args)
                              : ip.invoke_static(pr.cls, pr.method, pr.args);
    return ip.render(r);
  });
  if (!pr.has_receiver) return out;
  auto acc = catalog.types.find(pr.cls);
  if (acc == catalog.types.end()) return out;
  for (const auto& g : acc->second.getters) {
    out += "; " + g + "()=" + outcome("", [&] { return ip.render(ip.invoke(receiver, g, {})); });
  }
  if (acc->second.debug_render) {
    out += "; toString()=" + outcome("", [&] { return ip.render(receiver); });
  }
  return out;
}

std::vector<std::string> run_probes(const Program& program, const std::vector<Probe>& probes,
                                    const AccessorCatalog& catalog, const RunOptions& opts,
                                    std::vector<std::string>* labels) {
  auto image = build_program(program);
  auto dir = opts.scratch / ("oracle-" + program.id + "-" + program.digest());
  std::vector<std::string> out;
  out.reserve(probes.size());
  for (const auto& pr : probes) {
    std::string label;
    out.push_back(run_probe(image, pr, catalog, dir / "w", opts, labels ? &label : nullptr));
    if (labels) labels->push_back(std::move(label));
  }
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  return out;
}

}  // namespace

std::vector<OracleVerdict> oracle_label(const Program& original,
                                        const std::vector<const Program*>& variants,
                                        const RunOptions& opts) {
  AccessorCatalog catalog = build_catalog(original.units);
  std::vector<Probe> probes = plan_probes(original);
  std::vector<std::string> labels;
  std::vector<std::string> base = run_probes(original, probes, catalog, opts, &labels);
  std::vector<std::string> again = run_probes(original, probes, catalog, opts, nullptr);

  std::vector<OracleVerdict> out;
  for (const auto* v : variants) {
    OracleVerdict verdict;
    verdict.variant = v->id;
    std::vector<std::string> got;
    try {
      got = run_probes(*v, probes, catalog, opts, nullptr);
    } catch (const Error& e) {
      verdict.diverse = true;
      verdict.witness_probe = "build";
      verdict.witness_variant = e.what();
      out.push_back(std::move(verdict));
      continue;
    }
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (base[i] != again[i]) continue;
      ++verdict.probes;
      if (!verdict.diverse && got[i] != base[i]) {
        verdict.diverse = true;
        verdict.witness_probe = labels[i];
        verdict.witness_original = base[i];
        verdict.witness_variant = got[i];
      }
    }
    out.push_back(std::move(verdict));
  }
  return out;
}

std::string variant_json(const VariantDescriptor& v, const Program& original) {
  auto sites = statement_sites(original.units);
  nlohmann::ordered_json j;
  j["id"] = v.id;
  j["kind"] = std::string(to_string(v.kind));
  j["transplantation_point"] = v.point;
  j["point_statement"] = lang::print_stmt(*sites.at(v.point).stmt);
  j["point_location"] = sites.at(v.point).cls + "." + sites.at(v.point).method;
  if (v.transplant) {
    j["transplant"] = *v.transplant;
    j["transplant_statement"] = lang::print_stmt(*sites.at(*v.transplant).stmt);
  } else {
    j["transplant"] = nullptr;
  }
  j["bindings"] = v.bindings;
  j["identity"] = v.identity;
  j["check"] = {{"covered", v.check.covered},
                {"passes", v.check.passes},
                {"is_sosie", v.check.is_sosie}};
  return j.dump(2) + "\n";
}

std::string ground_truth_json(const std::vector<OracleVerdict>& verdicts) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json grid;
  grid["int"] = oracle_int_grid();
  nlohmann::ordered_json doubles = nlohmann::ordered_json::array();
  for (double d : oracle_double_grid()) doubles.push_back(format_double(d));
  grid["double"] = doubles;
  grid["boolean"] = {true, false};
  grid["String"] = oracle_string_grid();
  j["grid"] = grid;
  nlohmann::ordered_json vs = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    nlohmann::ordered_json e;
    e["variant"] = v.variant;
    e["diverse"] = v.diverse;
    e["probes"] = v.probes;
    if (v.diverse) {
      e["witness"] = {{"probe", v.witness_probe},
                      {"original", v.witness_original},
                      {"variant", v.witness_variant}};
    }
    vs.push_back(std::move(e));
  }
  j["variants"] = vs;
  return j.dump(2) + "\n";
}

void write_variants(const std::filesystem::path& root, const Program& original,
                    const ForgeResult& result, const std::vector<OracleVerdict>& verdicts) {
  for (const auto& v : result.accepted) {
    auto dir = root / "variants" / v.id;
    v.patched.write(dir / "src");
    write_file_if_changed(dir / "variant.json", variant_json(v, original));
  }
  write_file_if_changed(root / "ground_truth.json", ground_truth_json(verdicts));
}

}  // namespace nvamp
