#include "nvamp/test_ir.hpp"

#include <set>

#include "nvamp/errors.hpp"
#include "nvamp/lang/parser.hpp"
#include "nvamp/lang/printer.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

using lang::Expr;
using lang::ExprKind;
using lang::Stmt;
using lang::StmtKind;

std::string_view to_string(LiteralKind k) {
  switch (k) {
    case LiteralKind::kString: return "STRING";
    case LiteralKind::kInteger: return "INTEGER";
    case LiteralKind::kFloat: return "FLOAT";
    case LiteralKind::kBoolean: return "BOOLEAN";
  }
  return "?";
}

std::string SlotId::str() const {
  return test + "/" + std::to_string(ordinal) + "/" + std::to_string(slot);
}

bool Statement::operator==(const Statement& o) const {
  return ordinal == o.ordinal && kind == o.kind && node == o.node &&
         children == o.children && callee == o.callee &&
         literal_slots == o.literal_slots && from_assertion == o.from_assertion;
}

std::string_view to_string(TransformKind k) {
  switch (k) {
    case TransformKind::kStrRemove: return "STR_REMOVE";
    case TransformKind::kStrAdd: return "STR_ADD";
    case TransformKind::kStrReplace: return "STR_REPLACE";
    case TransformKind::kNumPlus1: return "NUM_PLUS1";
    case TransformKind::kNumMinus1: return "NUM_MINUS1";
    case TransformKind::kNumTimes2: return "NUM_TIMES2";
    case TransformKind::kNumDiv2: return "NUM_DIV2";
    case TransformKind::kBoolNegate: return "BOOL_NEGATE";
    case TransformKind::kStmtRemove: return "STMT_REMOVE";
    case TransformKind::kStmtDup: return "STMT_DUP";
    case TransformKind::kTdrStack: return "TDR_STACK";
  }
  return "?";
}

std::string_view label(TransformKind k) {
  switch (k) {
    case TransformKind::kStrRemove: return "StrRemove";
    case TransformKind::kStrAdd: return "StrAdd";
    case TransformKind::kStrReplace: return "StrReplace";
    case TransformKind::kNumPlus1: return "NumPlus1";
    case TransformKind::kNumMinus1: return "NumMinus1";
    case TransformKind::kNumTimes2: return "NumTimes2";
    case TransformKind::kNumDiv2: return "NumDiv2";
    case TransformKind::kBoolNegate: return "BoolNegate";
    case TransformKind::kStmtRemove: return "Remove";
    case TransformKind::kStmtDup: return "Add";
    case TransformKind::kTdrStack: return "Tdr";
  }
  return "?";
}

std::string TransformationDescriptor::name_suffix() const {
  std::string out(label(kind));
  if (kind == TransformKind::kTdrStack) {
    for (const auto& [id, step] : stack) {
      std::string_view l = label(step);
      l.remove_prefix(3);  // "NumPlus1" -> "Plus1"
      out += "_" + std::to_string(id.ordinal) + "_" + std::to_string(id.slot) +
             std::string(l);
    }
    return out;
  }
  if (slot) {
    return out + "_" + std::to_string(slot->ordinal) + "_" +
           std::to_string(slot->slot);
  }
  return out + "_" + std::to_string(ordinal);
}

bool TestCase::operator==(const TestCase& o) const {
  return name == o.name && file == o.file && annotations == o.annotations &&
         is_public == o.is_public && throws_list == o.throws_list &&
         statements == o.statements && generated == o.generated &&
         parent == o.parent && transform == o.transform &&
         instrumented == o.instrumented;
}

bool TestFile::operator==(const TestFile& o) const {
  return path == o.path && class_name == o.class_name &&
         is_public == o.is_public && imports == o.imports &&
         fields == o.fields && helpers == o.helpers;
}

const TestCase* TestSuite::find(const std::string& n) const {
  for (const auto& t : tests) {
    if (t.name == n) return &t;
  }
  return nullptr;
}

std::string exception_point_id(const std::string& test) {
  return test + "@*:<exception>#0";
}

bool is_assertion(std::string_view callee_name, bool framework_provided) {
  if (!framework_provided) return false;
  return contains_ci(callee_name, "assert") || contains_ci(callee_name, "fail");
}

void for_each_statement(const std::vector<Statement>& stmts,
                        const std::function<void(const Statement&)>& fn) {
  for (const auto& s : stmts) {
    fn(s);
    for_each_statement(s.children, fn);
  }
}

void for_each_statement(std::vector<Statement>& stmts,
                        const std::function<void(Statement&)>& fn) {
  for (auto& s : stmts) {
    fn(s);
    for_each_statement(s.children, fn);
  }
}

std::size_t count_statements(const TestCase& test) {
  std::size_t n = 0;
  for_each_statement(test.statements, [&](const Statement&) { ++n; });
  return n;
}

namespace {

std::optional<LiteralKind> literal_kind(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kStringLit: return LiteralKind::kString;
    case ExprKind::kIntLit:
    case ExprKind::kLongLit:
      return LiteralKind::kInteger;
    case ExprKind::kDoubleLit: return LiteralKind::kFloat;
    case ExprKind::kBoolLit: return LiteralKind::kBoolean;
    default: return std::nullopt;
  }
}

void collect_slots(Statement& s, const std::string& test) {
  s.literal_slots.clear();
  lang::walk_own_exprs(s.node, [&](const Expr& root) {
    lang::walk_exprs(root, [&](const Expr& e) {
      if (auto k = literal_kind(e)) {
        LiteralSlot slot;
        slot.id = SlotId{test, s.ordinal, static_cast<int>(s.literal_slots.size())};
        slot.kind = *k;
        slot.value = e;
        s.literal_slots.push_back(std::move(slot));
      }
    });
  });
}

struct FrameworkInfo {
  bool static_import = false;
  bool class_import = false;
  std::set<std::string> own_methods;
};

FrameworkInfo framework_info(const lang::CompilationUnit& unit,
                             const lang::ClassDecl& cls) {
  FrameworkInfo info;
  for (const auto& imp : unit.imports) {
    if (imp.is_static) {
      if ((imp.path == "unit.Assert" && imp.wildcard) ||
          (imp.path.rfind("unit.Assert.", 0) == 0 && !imp.wildcard)) {
        info.static_import = true;
      }
    } else if ((imp.path == "unit.Assert" && !imp.wildcard) ||
               (imp.path == "unit" && imp.wildcard)) {
      info.class_import = true;
    }
  }
  for (const auto& m : cls.methods) info.own_methods.insert(m.name);
  return info;
}

// Assertion callee of an expression statement, or "" if it is not one.
std::string assertion_callee(const Stmt& s, const FrameworkInfo& fw) {
  if (s.kind != StmtKind::kExpr) return "";
  const Expr& e = s.exprs[0];
  if (e.kind != ExprKind::kCall) return "";
  bool framework = false;
  if (!e.has_receiver()) {
    framework = fw.static_import && !fw.own_methods.count(e.text);
  } else {
    framework = e.receiver().kind == ExprKind::kName &&
                e.receiver().text == "Assert" && fw.class_import;
  }
  return is_assertion(e.text, framework) ? e.text : "";
}

constexpr const char* kGuardVar = "thrown";

// Recognizes the exception guard added by instrumentation:
//   try { ... } catch (Exception thrown) { Observe.exception("<id>", thrown); }
const std::vector<Stmt>* guarded_body(const std::vector<Stmt>& body,
                                      const std::string& test) {
  if (body.size() != 1 || body[0].kind != StmtKind::kTry) return nullptr;
  const Stmt& t = body[0];
  if (t.type != "Exception" || t.name != kGuardVar || t.alt.size() != 1) {
    return nullptr;
  }
  const Stmt& h = t.alt[0];
  if (h.kind != StmtKind::kExpr) return nullptr;
  Expr expected = Expr::method_call(
      Expr::name("Observe"), "exception",
      {Expr::string_lit(exception_point_id(test)), Expr::name(kGuardVar)});
  return h.exprs[0] == expected ? &t.body : nullptr;
}

[[noreturn]] void unsupported(const lang::SourceLoc& loc, const std::string& what) {
  throw Error(ErrorCode::kUnsupportedConstruct, loc.str() + ": " + what);
}

std::vector<Statement> lower(const std::vector<Stmt>& body,
                             const FrameworkInfo& fw, int depth) {
  std::vector<Statement> out;
  for (const auto& s : body) {
    Statement st;
    switch (s.kind) {
      case StmtKind::kVarDecl:
        st.node = s;
        break;
      case StmtKind::kExpr: {
        st.node = s;
        std::string callee = assertion_callee(s, fw);
        if (!callee.empty()) {
          st.kind = StatementKind::kAssertion;
          st.callee = callee;
        }
        break;
      }
      case StmtKind::kIf:
      case StmtKind::kFor:
        if (depth > 0) unsupported(s.loc, "nested compound statement in a test");
        if (s.kind == StmtKind::kIf && !s.alt.empty()) {
          unsupported(s.loc, "else branch in a test");
        }
        st.kind = StatementKind::kCompound;
        st.node = s;
        st.node.body.clear();
        st.children = lower(s.body, fw, depth + 1);
        break;
      default:
        unsupported(s.loc, "statement outside the supported test subset");
    }
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<Stmt> raise(const std::vector<Statement>& stmts) {
  std::vector<Stmt> out;
  for (const auto& s : stmts) {
    Stmt node = s.node;
    if (s.kind == StatementKind::kCompound) {
      if (node.kind != StmtKind::kIf && node.kind != StmtKind::kFor) {
        throw Error(ErrorCode::kRenderError,
                    "compound statement " + std::to_string(s.ordinal) +
                        " has no source form");
      }
      node.body = raise(s.children);
    } else if (s.kind == StatementKind::kAssertion &&
               (node.kind != StmtKind::kExpr || node.exprs.empty())) {
      throw Error(ErrorCode::kRenderError,
                  "assertion " + std::to_string(s.ordinal) + " has no call");
    }
    out.push_back(std::move(node));
  }
  return out;
}

}  // namespace

void renumber(TestCase& test) {
  int next = 0;
  for_each_statement(test.statements, [&](Statement& s) {
    s.ordinal = next++;
    collect_slots(s, test.name);
  });
}

TestSuite parse_test_sources(
    const std::vector<std::pair<std::string, std::string>>& path_and_source) {
  TestSuite suite;
  std::set<std::string> names;
  for (const auto& [path, source] : path_and_source) {
    lang::CompilationUnit unit = lang::parse_unit(source, path);
    if (unit.classes.size() != 1) {
      unsupported(lang::SourceLoc{path, 1, 1}, "a test file must declare exactly one class");
    }
    const lang::ClassDecl& cls = unit.classes[0];
    FrameworkInfo fw = framework_info(unit, cls);
    TestFile file;
    file.path = path;
    file.class_name = cls.name;
    file.is_public = cls.is_public;
    file.imports = unit.imports;
    file.fields = cls.fields;
    std::size_t index = suite.files.size();
    for (const auto& m : cls.methods) {
      if (!m.has_annotation("Test")) {
        file.helpers.push_back(m);
        continue;
      }
      TestCase t;
      t.name = m.name;
      t.file = index;
      t.annotations = m.annotations;
      t.is_public = m.is_public;
      t.throws_list = m.throws_list;
      if (const auto* inner = guarded_body(m.body, m.name)) {
        t.statements = lower(*inner, fw, 0);
        t.instrumented = true;
      } else {
        t.statements = lower(m.body, fw, 0);
      }
      if (!names.insert(t.name).second) {
        throw Error(ErrorCode::kParseError,
                    m.loc.str() + ": duplicate test name " + t.name);
      }
      renumber(t);
      suite.tests.push_back(std::move(t));
    }
    suite.files.push_back(std::move(file));
  }
  return suite;
}

TestSuite parse_tests(const std::filesystem::path& corpus_root) {
  std::filesystem::path dir = corpus_root / "tests";
  std::vector<std::pair<std::string, std::string>> sources;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& p : list_files(dir, ".mj")) {
      sources.emplace_back(std::filesystem::relative(p, dir).generic_string(),
                           read_file(p));
    }
  }
  return parse_test_sources(sources);
}

lang::Method to_method(const TestCase& test) {
  lang::Method m;
  m.annotations = test.annotations;
  m.is_public = test.is_public;
  m.return_type = "void";
  m.name = test.name;
  m.throws_list = test.throws_list;
  m.body = raise(test.statements);
  if (test.instrumented) {
    Stmt guard;
    guard.kind = StmtKind::kTry;
    guard.body = std::move(m.body);
    guard.type = "Exception";
    guard.name = kGuardVar;
    guard.alt.push_back(Stmt::expr_stmt(Expr::method_call(
        Expr::name("Observe"), "exception",
        {Expr::string_lit(exception_point_id(test.name)), Expr::name(kGuardVar)})));
    m.body.clear();
    m.body.push_back(std::move(guard));
  }
  return m;
}

lang::CompilationUnit to_unit(const TestSuite& suite, std::size_t file) {
  if (file >= suite.files.size()) {
    throw Error(ErrorCode::kRenderError, "no test file #" + std::to_string(file));
  }
  const TestFile& f = suite.files[file];
  lang::CompilationUnit unit;
  unit.file = f.path;
  unit.imports = f.imports;
  lang::ClassDecl cls;
  cls.is_public = f.is_public;
  cls.name = f.class_name;
  cls.fields = f.fields;
  cls.methods = f.helpers;
  for (const auto& t : suite.tests) {
    if (t.file == file) cls.methods.push_back(to_method(t));
  }
  unit.classes.push_back(std::move(cls));
  return unit;
}

std::string render_file(const TestSuite& suite, std::size_t file) {
  return lang::print_unit(to_unit(suite, file));
}

std::vector<std::filesystem::path> render_tests(const TestSuite& suite,
                                                const std::filesystem::path& out_root) {
  for (const auto& t : suite.tests) {
    if (t.file >= suite.files.size()) {
      throw Error(ErrorCode::kRenderError, "test " + t.name + " has no source file");
    }
  }
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < suite.files.size(); ++i) {
    bool has_tests = false;
    for (const auto& t : suite.tests) has_tests = has_tests || t.file == i;
    if (!has_tests) continue;
    std::filesystem::path p = out_root / suite.files[i].path;
    write_file_if_changed(p, render_file(suite, i));
    written.push_back(p);
  }
  return written;
}

}  // namespace nvamp
