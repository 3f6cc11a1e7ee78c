#include "nvamp/observer.hpp"

#include <algorithm>
#include <set>

#include "nvamp/errors.hpp"
#include "nvamp/lang/printer.hpp"

namespace nvamp {

using lang::Expr;
using lang::ExprKind;
using lang::Stmt;
using lang::StmtKind;

std::string_view to_string(PointSource s) {
  switch (s) {
    case PointSource::kGetter: return "GETTER";
    case PointSource::kPublicField: return "PUBLIC_FIELD";
    case PointSource::kDebugRender: return "DEBUG_RENDER";
    case PointSource::kOriginalAssertionCall: return "ORIGINAL_ASSERTION_CALL";
    case PointSource::kExceptionMessage: return "EXCEPTION_MESSAGE";
  }
  return "?";
}

std::string_view to_string(ObservationMode m) {
  switch (m) {
    case ObservationMode::kFull: return "FULL";
    case ObservationMode::kInputOnly: return "INPUT_ONLY";
    case ObservationMode::kTdr: return "TDR";
    case ObservationMode::kObservationOnly: return "OBSERVATION_ONLY";
  }
  return "?";
}

std::string mode_key(ObservationMode m) {
  std::string s(to_string(m));
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_accessor(const lang::Method& m) {
  if (m.is_ctor || m.is_static || !m.is_public || !m.params.empty()) return false;
  if (m.name.size() > 3 && m.name.rfind("get", 0) == 0) return m.return_type != "void";
  if (m.name.size() > 2 && m.name.rfind("is", 0) == 0) return m.return_type == "boolean";
  return false;
}

AccessorCatalog build_catalog(const std::vector<lang::CompilationUnit>& program) {
  AccessorCatalog cat;
  for (const auto& unit : program) {
    for (const auto& cls : unit.classes) {
      TypeAccessors& acc = cat.types[cls.name];
      for (const auto& m : cls.methods) {
        if (is_accessor(m)) acc.getters.push_back(m.name);
        if (m.name == "toString" && m.params.empty() && !m.is_static && !m.is_ctor) {
          acc.debug_render = true;
        }
      }
      for (const auto& f : cls.fields) {
        if (f.is_public && !f.is_static) acc.fields.push_back(f.name);
      }
      std::sort(acc.getters.begin(), acc.getters.end());
      acc.getters.erase(std::unique(acc.getters.begin(), acc.getters.end()),
                        acc.getters.end());
      std::sort(acc.fields.begin(), acc.fields.end());
    }
  }
  return cat;
}

namespace {

struct LocalObject {
  std::string name;
  std::string type;
  int ordinal = 0;
};

std::string format_id(const ObservationPoint& p) {
  return p.test + "@" + p.anchor + ":" + p.receiver + "." + p.accessor + "#" +
         std::to_string(p.occurrence);
}

const TypeAccessors* accessors_of(const AccessorCatalog& cat, const std::string& type) {
  auto it = cat.types.find(type);
  if (it == cat.types.end() || it->second.empty()) return nullptr;
  return &it->second;
}

void add_object_points(std::vector<ObservationPoint>& group, const std::string& test,
                       const std::string& anchor, const LocalObject& obj,
                       const TypeAccessors& acc) {
  auto add = [&](PointSource src, std::string accessor) {
    ObservationPoint p;
    p.source = src;
    p.test = test;
    p.anchor = anchor;
    p.receiver = obj.name;
    p.accessor = std::move(accessor);
    group.push_back(std::move(p));
  };
  for (const auto& g : acc.getters) add(PointSource::kGetter, g + "()");
  for (const auto& f : acc.fields) add(PointSource::kPublicField, f);
  if (acc.debug_render) add(PointSource::kDebugRender, "toString()");
}

void finish_group(std::vector<ObservationPoint>& group, std::vector<ObservationPoint>& out) {
  std::stable_sort(group.begin(), group.end(), [](const auto& a, const auto& b) {
    return std::tie(a.receiver, a.accessor) < std::tie(b.receiver, b.accessor);
  });
  std::map<std::string, int> seen;
  for (auto& p : group) {
    p.occurrence = seen[p.receiver + "." + p.accessor]++;
    p.point_id = format_id(p);
    out.push_back(std::move(p));
  }
  group.clear();
}

bool mentions(const std::vector<Statement>& stmts, const std::string& name) {
  bool found = false;
  for_each_statement(stmts, [&](const Statement& s) {
    lang::walk_own_exprs(s.node, [&](const Expr& root) {
      lang::walk_exprs(root, [&](const Expr& e) {
        if (e.kind == ExprKind::kName && e.text == name) found = true;
      });
    });
  });
  return found;
}

std::vector<LocalObject> objects_declared(const std::vector<Statement>& stmts,
                                          const AccessorCatalog& cat) {
  std::vector<LocalObject> out;
  for (const auto& s : stmts) {
    if (s.node.kind == StmtKind::kVarDecl && accessors_of(cat, s.node.type)) {
      out.push_back({s.node.name, s.node.type, s.ordinal});
    }
  }
  return out;
}

std::set<std::string> declared_names(const std::vector<Statement>& stmts, int up_to) {
  std::set<std::string> names;
  for (const auto& s : stmts) {
    if (s.ordinal > up_to) break;
    if (s.node.kind == StmtKind::kVarDecl) names.insert(s.node.name);
  }
  return names;
}

// Variables in scope after the statement with `ordinal`, or at the end of
// that compound's body when `body_end` is set.
std::set<std::string> visible_at(const TestCase& test, int ordinal, bool body_end) {
  for (const auto& top : test.statements) {
    bool inside = !top.children.empty() && top.children.front().ordinal <= ordinal &&
                  top.children.back().ordinal >= ordinal;
    if (top.ordinal == ordinal || inside) {
      std::set<std::string> names = declared_names(test.statements, top.ordinal);
      if (top.ordinal == ordinal && !body_end) return names;
      for (const auto& i : top.node.init) {
        if (i.kind == StmtKind::kVarDecl) names.insert(i.name);
      }
      auto inner = declared_names(top.children, body_end ? 1 << 30 : ordinal);
      names.insert(inner.begin(), inner.end());
      return names;
    }
  }
  return {};
}

Stmt log_call(const ObservationPoint& p) {
  Expr id = Expr::string_lit(p.point_id);
  Expr recv = Expr::name(p.receiver);
  Expr observe = Expr::name("Observe");
  switch (p.source) {
    case PointSource::kGetter: {
      std::string method = p.accessor.substr(0, p.accessor.size() - 2);
      return Stmt::expr_stmt(Expr::method_call(
          observe, "probe", {id, Expr::method_call(recv, method, {})}));
    }
    case PointSource::kPublicField:
      return Stmt::expr_stmt(
          Expr::method_call(observe, "probe", {id, Expr::field(recv, p.accessor)}));
    default:
      return Stmt::expr_stmt(Expr::method_call(observe, "render", {id, recv}));
  }
}

Statement simple(Stmt node) {
  Statement s;
  s.node = std::move(node);
  return s;
}

bool has_observe_calls(const TestCase& t) {
  bool found = false;
  for_each_statement(t.statements, [&](const Statement& s) {
    lang::walk_own_exprs(s.node, [&](const Expr& root) {
      lang::walk_exprs(root, [&](const Expr& e) {
        if (e.kind == ExprKind::kCall && e.has_receiver() &&
            e.receiver().kind == ExprKind::kName && e.receiver().text == "Observe") {
          found = true;
        }
      });
    });
  });
  return found;
}

struct Plan {
  std::map<int, std::string> in_place;
  std::map<int, std::vector<const ObservationPoint*>> after;
  std::map<int, std::vector<const ObservationPoint*>> body_end;
};

std::vector<Statement> rebuild(const std::vector<Statement>& stmts, const Plan& plan) {
  std::vector<Statement> out;
  for (const auto& s : stmts) {
    Statement copy = s;
    copy.children = rebuild(s.children, plan);
    auto ip = plan.in_place.find(s.ordinal);
    if (ip != plan.in_place.end()) {
      Expr call = copy.node.exprs[0];
      copy.node.exprs[0] = Expr::method_call(Expr::name("Observe"), "value",
                                             {Expr::string_lit(ip->second), call});
    }
    auto be = plan.body_end.find(s.ordinal);
    if (be != plan.body_end.end()) {
      for (const auto* p : be->second) copy.children.push_back(simple(log_call(*p)));
    }
    out.push_back(std::move(copy));
    auto af = plan.after.find(s.ordinal);
    if (af != plan.after.end()) {
      for (const auto* p : af->second) out.push_back(simple(log_call(*p)));
    }
  }
  return out;
}

}  // namespace

std::vector<ObservationPoint> discover_points(const TestCase& test,
                                              const AccessorCatalog& catalog) {
  std::vector<ObservationPoint> out;
  std::vector<ObservationPoint> group;

  // (d) calls hoisted out of removed assertions, observed in place
  for_each_statement(test.statements, [&](const Statement& s) {
    if (!s.from_assertion) return;
    const Expr& call = s.node.exprs[0];
    ObservationPoint p;
    p.source = PointSource::kOriginalAssertionCall;
    p.test = test.name;
    p.anchor = std::to_string(s.ordinal);
    p.receiver = call.has_receiver() ? lang::print_expr(call.receiver()) : "this";
    p.accessor = call.text + "/" + std::to_string(call.arg_count());
    group.push_back(std::move(p));
    finish_group(group, out);
  });

  std::vector<LocalObject> top = objects_declared(test.statements, catalog);

  // objects living in, or mutated by, a compound body: logged per iteration
  for (const auto& s : test.statements) {
    if (s.kind != StatementKind::kCompound) continue;
    std::vector<LocalObject> objs;
    for (const auto& i : s.node.init) {
      if (i.kind == StmtKind::kVarDecl && accessors_of(catalog, i.type)) {
        objs.push_back({i.name, i.type, s.ordinal});
      }
    }
    for (auto& o : objects_declared(s.children, catalog)) objs.push_back(o);
    if (s.node.kind == StmtKind::kFor) {
      for (const auto& o : top) {
        if (o.ordinal < s.ordinal && mentions(s.children, o.name)) objs.push_back(o);
      }
    }
    std::string anchor = std::to_string(s.ordinal) + "/body";
    for (const auto& o : objs) {
      add_object_points(group, test.name, anchor, o, *accessors_of(catalog, o.type));
    }
    finish_group(group, out);
  }

  // top-level objects after the final statement
  if (!test.statements.empty()) {
    std::string anchor = std::to_string(test.statements.back().ordinal);
    for (const auto& o : top) {
      add_object_points(group, test.name, anchor, o, *accessors_of(catalog, o.type));
    }
    finish_group(group, out);
  }
  return out;
}

TestCase instrument(const TestCase& test, const std::vector<ObservationPoint>& points) {
  if (test.instrumented || has_observe_calls(test)) return test;
  Plan plan;
  std::map<int, const Statement*> by_ordinal;
  for_each_statement(test.statements,
                     [&](const Statement& s) { by_ordinal[s.ordinal] = &s; });
  for (const auto& p : points) {
    if (p.source == PointSource::kExceptionMessage) continue;
    bool body = p.anchor.size() > 5 && p.anchor.compare(p.anchor.size() - 5, 5, "/body") == 0;
    int ordinal = -1;
    try {
      ordinal = std::stoi(p.anchor);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInstrumentationError, "bad anchor in " + p.point_id);
    }
    auto st = by_ordinal.find(ordinal);
    if (st == by_ordinal.end()) {
      throw Error(ErrorCode::kInstrumentationError, "no anchor statement for " + p.point_id);
    }
    if (p.source == PointSource::kOriginalAssertionCall) {
      if (!st->second->from_assertion) {
        throw Error(ErrorCode::kInstrumentationError,
                    "anchor of " + p.point_id + " is not a hoisted call");
      }
      plan.in_place[ordinal] = p.point_id;
      continue;
    }
    if (!visible_at(test, ordinal, body).count(p.receiver)) {
      throw Error(ErrorCode::kInstrumentationError,
                  p.receiver + " is not in scope at the anchor of " + p.point_id);
    }
    if (body) {
      if (st->second->kind != StatementKind::kCompound) {
        throw Error(ErrorCode::kInstrumentationError,
                    "body anchor of " + p.point_id + " is not a compound");
      }
      plan.body_end[ordinal].push_back(&p);
    } else {
      plan.after[ordinal].push_back(&p);
    }
  }
  TestCase out = test;
  out.statements = rebuild(test.statements, plan);
  out.instrumented = true;
  renumber(out);
  return out;
}

std::vector<ObservationPoint> filter_points(const std::vector<ObservationPoint>& points,
                                            ObservationMode mode) {
  if (mode == ObservationMode::kFull || mode == ObservationMode::kObservationOnly) {
    return points;
  }
  std::vector<ObservationPoint> out;
  for (const auto& p : points) {
    if (p.source == PointSource::kOriginalAssertionCall ||
        p.source == PointSource::kExceptionMessage) {
      out.push_back(p);
    }
  }
  return out;
}

InstrumentedSuite instrument_suite(const TestSuite& suite, const AccessorCatalog& catalog,
                                   ObservationMode mode) {
  InstrumentedSuite out;
  out.mode = mode;
  out.suite.files = suite.files;
  for (const auto& t : suite.tests) {
    std::vector<ObservationPoint> pts = filter_points(discover_points(t, catalog), mode);
    ObservationPoint guard;
    guard.source = PointSource::kExceptionMessage;
    guard.test = t.name;
    guard.anchor = "*";
    guard.accessor = "<exception>";
    guard.point_id = exception_point_id(t.name);
    pts.push_back(guard);
    out.suite.tests.push_back(instrument(t, pts));
    for (auto& p : pts) out.points.push_back(std::move(p));
  }
  return out;
}

}  // namespace nvamp
