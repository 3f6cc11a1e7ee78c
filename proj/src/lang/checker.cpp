#include "nvamp/lang/checker.hpp"

#include <map>

namespace nvamp::lang {
namespace {

bool is_numeric(const std::string& t) {
  return t == "int" || t == "long" || t == "double";
}

std::string promote(const std::string& a, const std::string& b) {
  if (!is_numeric(a) || !is_numeric(b)) return "";
  if (a == "double" || b == "double") return "double";
  if (a == "long" || b == "long") return "long";
  return "int";
}

bool is_collection_of(const std::string& target, const std::string& source) {
  if (target == "List") return source == "ArrayList" || source == "LinkedList";
  if (target == "Map") return source == "HashMap" || source == "LinkedHashMap";
  return false;
}

// Assignment conversion; unknown ("") types are accepted.
bool assignable(const std::string& target, const std::string& source) {
  if (target.empty() || source.empty() || target == source) return true;
  if (target == "Object") return source != "int" && source != "long" &&
                                 source != "double" && source != "boolean";
  if (target == "long") return source == "int";
  if (target == "double") return source == "int" || source == "long";
  if (is_collection_of(target, source)) return true;
  if ((target == "Exception" || target == "RuntimeException") && is_exception_type(source)) {
    return true;
  }
  return false;
}

bool ends_block(const Stmt& s) {
  return s.kind == StmtKind::kReturn || s.kind == StmtKind::kThrow ||
         s.kind == StmtKind::kBreak || s.kind == StmtKind::kContinue;
}

bool always_exits(const std::vector<Stmt>& body);

bool stmt_exits(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::kReturn:
    case StmtKind::kThrow:
      return true;
    case StmtKind::kIf:
      return !s.alt.empty() && always_exits(s.body) && always_exits(s.alt);
    case StmtKind::kBlock: return always_exits(s.body);
    case StmtKind::kTry: return always_exits(s.body) && always_exits(s.alt);
    case StmtKind::kWhile:
      return s.exprs[0].kind == ExprKind::kBoolLit && s.exprs[0].flag;
    default: return false;
  }
}

bool always_exits(const std::vector<Stmt>& body) {
  return !body.empty() && stmt_exits(body.back());
}

class MethodChecker {
 public:
  MethodChecker(const Image& image, const ClassInfo& cls, const Method* method,
                std::vector<Diagnostic>& out)
      : image_(image), cls_(cls), method_(method), out_(out) {
    is_static_ = method && method->is_static;
  }

  void check_method() {
    scopes_.emplace_back();
    for (const auto& p : method_->params) {
      check_type(p.type, method_->loc);
      declare(p.name, p.type, method_->loc);
    }
    check_block(method_->body, false);
    if (!method_->is_ctor && method_->return_type != "void" &&
        !always_exits(method_->body)) {
      report(method_->loc, "missing return statement");
    }
  }

  void check_field_init(const Field& f) {
    is_static_ = f.is_static;
    scopes_.emplace_back();
    for (const auto& e : f.init) infer(e);
  }

 private:
  const Image& image_;
  const ClassInfo& cls_;
  const Method* method_;
  std::vector<Diagnostic>& out_;
  bool is_static_ = false;
  std::vector<std::map<std::string, std::string>> scopes_;

  void report(const SourceLoc& loc, const std::string& msg) {
    Diagnostic d;
    d.cls = cls_.name;
    if (method_) {
      d.method = method_->is_ctor ? "<init>" : method_->name;
      d.arity = method_->params.size();
      d.in_test = method_->has_annotation("Test");
    }
    d.message = loc.str() + ": " + msg;
    out_.push_back(std::move(d));
  }

  const std::string* local(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void declare(const std::string& name, const std::string& type,
               const SourceLoc& loc) {
    if (local(name)) {
      report(loc, "variable " + name + " is already defined");
      return;
    }
    scopes_.back()[name] = type;
  }

  void expect(const std::string& target, const std::string& source, const SourceLoc& loc) {
    if (!assignable(target, source)) {
      report(loc, "incompatible types: " + source + " cannot be converted to " + target);
    }
  }

  void check_type(const std::string& t, const SourceLoc& loc) {
    if (!is_builtin_type(t) && !image_.find_class(t)) {
      report(loc, "cannot find symbol: class " + t);
    }
  }

  // Type of a bare name used as a variable; nullptr when unresolved.
  const std::string* variable_type(const std::string& name) const {
    if (const std::string* t = local(name)) return t;
    if (!is_static_) {
      auto it = cls_.field_index.find(name);
      if (it != cls_.field_index.end()) return &cls_.instance_fields[it->second]->type;
    }
    auto it = cls_.static_index.find(name);
    if (it != cls_.static_index.end()) return &cls_.static_fields[it->second]->type;
    return nullptr;
  }

  bool names_class(const Expr& e) const {
    return e.kind == ExprKind::kName && !variable_type(e.text) &&
           (image_.find_class(e.text) || is_builtin_static_class(e.text));
  }

  void check_block(const std::vector<Stmt>& body, bool new_scope) {
    if (new_scope) scopes_.emplace_back();
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i > 0 && ends_block(body[i - 1])) {
        report(body[i].loc, "unreachable statement");
      }
      check_stmt(body[i]);
    }
    if (new_scope) scopes_.pop_back();
  }

  void check_stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::kVarDecl:
        check_type(s.type, s.loc);
        for (const auto& e : s.exprs) expect(s.type, infer(e), e.loc);
        declare(s.name, s.type, s.loc);
        break;
      case StmtKind::kReturn:
        for (const auto& e : s.exprs) {
          std::string t = infer(e);
          if (method_ && !method_->is_ctor) {
            if (method_->return_type == "void") {
              report(e.loc, "void method returns a value");
            } else {
              expect(method_->return_type, t, e.loc);
            }
          }
        }
        break;
      case StmtKind::kExpr:
      case StmtKind::kThrow:
        for (const auto& e : s.exprs) infer(e);
        break;
      case StmtKind::kIf:
      case StmtKind::kWhile:
        infer(s.exprs[0]);
        check_block(s.body, true);
        check_block(s.alt, true);
        break;
      case StmtKind::kFor:
        scopes_.emplace_back();
        for (const auto& i : s.init) check_stmt(i);
        for (const auto& e : s.exprs) infer(e);
        for (const auto& e : s.updates) infer(e);
        check_block(s.body, true);
        scopes_.pop_back();
        break;
      case StmtKind::kBlock: check_block(s.body, true); break;
      case StmtKind::kTry:
        check_block(s.body, true);
        if (!is_exception_type(s.type)) {
          report(s.loc, "catch type " + s.type + " is not an exception");
        }
        scopes_.emplace_back();
        declare(s.name, s.type, s.loc);
        check_block(s.alt, false);
        scopes_.pop_back();
        break;
      case StmtKind::kBreak:
      case StmtKind::kContinue:
        break;
    }
  }

  std::vector<std::string> infer_args(const Expr& e) {
    std::vector<std::string> types;
    for (std::size_t i = e.arg_begin(); i < e.kids.size(); ++i) {
      types.push_back(infer(e.kids[i]));
    }
    return types;
  }

  std::string infer(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kIntLit: return "int";
      case ExprKind::kLongLit: return "long";
      case ExprKind::kDoubleLit: return "double";
      case ExprKind::kStringLit: return "String";
      case ExprKind::kBoolLit: return "boolean";
      case ExprKind::kNullLit: return "";
      case ExprKind::kThis:
        if (is_static_) report(e.loc, "this used in a static context");
        return cls_.name;
      case ExprKind::kName: {
        if (const std::string* t = variable_type(e.text)) return *t;
        report(e.loc, "cannot find symbol: " + e.text);
        return "";
      }
      case ExprKind::kField: return infer_field(e);
      case ExprKind::kCall: return infer_call(e);
      case ExprKind::kNew: return infer_new(e);
      case ExprKind::kUnary: {
        std::string t = infer(e.kids[0]);
        return e.text == "!" ? "boolean" : t;
      }
      case ExprKind::kBinary: {
        std::string a = infer(e.kids[0]);
        std::string b = infer(e.kids[1]);
        const std::string& op = e.text;
        if (op == "&&" || op == "||" || op == "==" || op == "!=" || op == "<" ||
            op == ">" || op == "<=" || op == ">=") {
          return "boolean";
        }
        if (op == "+" && (a == "String" || b == "String")) return "String";
        return promote(a, b);
      }
      case ExprKind::kAssign:
      case ExprKind::kIncDec: {
        const Expr& target = e.kids[0];
        if (target.kind != ExprKind::kName && target.kind != ExprKind::kField) {
          report(e.loc, "expression is not assignable");
        }
        std::string t = infer(target);
        for (std::size_t i = 1; i < e.kids.size(); ++i) {
          std::string v = infer(e.kids[i]);
          if (e.kind == ExprKind::kAssign && e.text == "=") expect(t, v, e.loc);
        }
        return t;
      }
      case ExprKind::kCast:
        infer(e.kids[0]);
        return e.text;
    }
    return "";
  }

  std::string infer_field(const Expr& e) {
    const Expr& recv = e.kids[0];
    if (names_class(recv)) {
      if (const ClassInfo* ci = image_.find_class(recv.text)) {
        auto it = ci->static_index.find(e.text);
        if (it != ci->static_index.end()) return ci->static_fields[it->second]->type;
      } else if (builtin_static_field(recv.text, e.text)) {
        if (recv.text == "Integer") return "int";
        if (recv.text == "Long") return "long";
        return "double";
      }
      report(e.loc, "cannot find symbol: " + recv.text + "." + e.text);
      return "";
    }
    std::string t = infer(recv);
    if (const ClassInfo* ci = image_.find_class(t)) {
      auto it = ci->field_index.find(e.text);
      if (it != ci->field_index.end()) return ci->instance_fields[it->second]->type;
      report(e.loc, "cannot find symbol: field " + e.text + " in " + t);
      return "";
    }
    if (!t.empty() && t != "Object") {
      report(e.loc, "cannot find symbol: field " + e.text + " in " + t);
    }
    return "";
  }

  std::string infer_call(const Expr& e) {
    std::size_t n = e.arg_count();
    if (!e.has_receiver()) {
      infer_args(e);
      if (const Method* m = cls_.find(e.text, n)) {
        if (is_static_ && !m->is_static) {
          report(e.loc, "non-static method " + e.text + " called from a static context");
        }
        return m->return_type;
      }
      if (cls_.imports_framework_static() && is_framework_method(e.text) &&
          builtin_static_method("Assert", e.text, n)) {
        return "void";
      }
      report(e.loc, "cannot find symbol: method " + e.text + "/" + std::to_string(n));
      return "";
    }
    const Expr& recv = e.receiver();
    if (names_class(recv)) {
      infer_args(e);
      if (const ClassInfo* ci = image_.find_class(recv.text)) {
        const Method* m = ci->find(e.text, n);
        if (m && m->is_static) return m->return_type;
      } else if (builtin_static_method(recv.text, e.text, n)) {
        if (recv.text == "Assert" && !cls_.imports_framework_class()) {
          report(e.loc, "cannot find symbol: class Assert");
        }
        return static_return(recv.text, e.text);
      }
      report(e.loc, "cannot find symbol: method " + recv.text + "." + e.text + "/" +
                        std::to_string(n));
      return "";
    }
    std::string t = infer(recv);
    infer_args(e);
    if (const ClassInfo* ci = image_.find_class(t)) {
      if (const Method* m = ci->find(e.text, n)) return m->return_type;
      if (e.text == "toString" && n == 0) return "String";
      if (e.text == "hashCode" && n == 0) return "int";
      if (e.text == "equals" && n == 1) return "boolean";
      report(e.loc, "cannot find symbol: method " + e.text + "/" + std::to_string(n) +
                        " in " + t);
      return "";
    }
    if (t == "int" || t == "long" || t == "double" || t == "boolean") {
      report(e.loc, "cannot call " + e.text + " on primitive " + t);
      return "";
    }
    if (t.empty() || t == "Object") return "";
    if (!builtin_member_method(t, e.text, n)) {
      report(e.loc, "cannot find symbol: method " + e.text + "/" + std::to_string(n) +
                        " in " + t);
      return "";
    }
    std::string r = builtin_member_return(t, e.text);
    return r == "Object" ? "" : r;
  }

  static std::string static_return(const std::string& cls, const std::string& m) {
    if (cls == "Math") {
      if (m == "round") return "long";
      if (m == "abs" || m == "max" || m == "min") return "";
      return "double";
    }
    if (cls == "Integer") return m == "toString" ? "String" : "int";
    if (cls == "Long") return m == "toString" ? "String" : "long";
    if (cls == "Double") {
      if (m == "parseDouble") return "double";
      if (m == "toString") return "String";
      return "boolean";
    }
    if (cls == "String") return "String";
    if (cls == "System") {
      if (m == "nanoTime" || m == "currentTimeMillis") return "long";
      if (m == "randomInt" || m == "identityHashCode") return "int";
      return "String";
    }
    if (cls == "Files") {
      if (m == "read" || m == "absolutePath") return "String";
      if (m == "exists" || m == "delete") return "boolean";
    }
    return "void";
  }

  std::string infer_new(const Expr& e) {
    for (const auto& k : e.kids) infer(k);
    if (const ClassInfo* ci = image_.find_class(e.text)) {
      bool ok = ci->find_ctor(e.kids.size()) ||
                (ci->ctors.empty() && e.kids.empty());
      if (!ok) {
        report(e.loc, "no constructor " + e.text + "/" + std::to_string(e.kids.size()));
      }
      return e.text;
    }
    const std::string& t = e.text;
    if (is_exception_type(t)) {
      if (e.kids.size() > 1) report(e.loc, "exception constructors take at most 1 argument");
      return t;
    }
    if (t == "ArrayList" || t == "LinkedList" || t == "List" || t == "HashMap" ||
        t == "LinkedHashMap" || t == "Map" || t == "Object") {
      if (!e.kids.empty()) report(e.loc, "constructor " + t + " takes no arguments");
      return t;
    }
    report(e.loc, "cannot find symbol: class " + t);
    return "";
  }
};

}  // namespace

std::vector<Diagnostic> check_class(const Image& image, const ClassInfo& cls) {
  std::vector<Diagnostic> out;
  std::map<std::pair<std::string, std::size_t>, int> seen;
  for (const auto& m : cls.decl->methods) {
    auto key = std::make_pair(m.is_ctor ? std::string("<init>") : m.name,
                              m.params.size());
    if (seen[key]++) {
      Diagnostic d;
      d.cls = cls.name;
      d.method = key.first;
      d.arity = key.second;
      d.in_test = m.has_annotation("Test");
      d.message = m.loc.str() + ": duplicate method " + key.first;
      out.push_back(d);
    }
    if (m.has_annotation("Test") && (!m.params.empty() || m.is_static)) {
      Diagnostic d;
      d.cls = cls.name;
      d.method = m.name;
      d.arity = m.params.size();
      d.in_test = true;
      d.message = m.loc.str() + ": test methods take no parameters and are not static";
      out.push_back(d);
    }
    MethodChecker(image, cls, &m, out).check_method();
  }
  for (const auto& f : cls.decl->fields) {
    MethodChecker checker(image, cls, nullptr, out);
    checker.check_field_init(f);
  }
  return out;
}

std::set<std::string> broken_tests(const Image& image, const ClassInfo& cls,
                                   std::vector<Diagnostic>* diagnostics) {
  std::vector<Diagnostic> diags = check_class(image, cls);
  std::set<std::string> tests;
  for (const auto& m : cls.decl->methods) {
    if (m.has_annotation("Test")) tests.insert(m.name);
  }
  std::set<std::string> broken;
  bool all = false;
  for (const auto& d : diags) {
    if (d.in_test) {
      broken.insert(d.method);
    } else {
      all = true;
    }
  }
  if (all) broken = tests;
  // propagate through test-to-test calls
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& m : cls.decl->methods) {
      if (!m.has_annotation("Test") || broken.count(m.name)) continue;
      bool calls_broken = false;
      walk_stmts(m.body, [&](const Stmt& st) {
        walk_own_exprs(st, [&](const Expr& root) {
          walk_exprs(root, [&](const Expr& e) {
            if (e.kind == ExprKind::kCall && !e.has_receiver() &&
                broken.count(e.text)) {
              calls_broken = true;
            }
          });
        });
      });
      if (calls_broken) {
        broken.insert(m.name);
        changed = true;
      }
    }
  }
  if (diagnostics) *diagnostics = std::move(diags);
  return broken;
}

}  // namespace nvamp::lang
