#include "nvamp/lang/ast.hpp"

#include <algorithm>
#include <cmath>

namespace nvamp::lang {

std::string SourceLoc::str() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

bool Expr::is_literal() const {
  switch (kind) {
    case ExprKind::kIntLit:
    case ExprKind::kLongLit:
    case ExprKind::kDoubleLit:
    case ExprKind::kStringLit:
    case ExprKind::kBoolLit:
      return true;
    default:
      return false;
  }
}

Expr Expr::int_lit(std::int64_t v) {
  Expr e;
  e.kind = ExprKind::kIntLit;
  e.int_value = v;
  return e;
}

Expr Expr::long_lit(std::int64_t v) {
  Expr e;
  e.kind = ExprKind::kLongLit;
  e.int_value = v;
  return e;
}

Expr Expr::double_lit(double v) {
  Expr e;
  e.kind = ExprKind::kDoubleLit;
  e.double_value = v;
  return e;
}

Expr Expr::string_lit(std::string v) {
  Expr e;
  e.kind = ExprKind::kStringLit;
  e.text = std::move(v);
  return e;
}

Expr Expr::bool_lit(bool v) {
  Expr e;
  e.kind = ExprKind::kBoolLit;
  e.flag = v;
  return e;
}

Expr Expr::null_lit() { return Expr{}; }

Expr Expr::name(std::string id) {
  Expr e;
  e.kind = ExprKind::kName;
  e.text = std::move(id);
  return e;
}

Expr Expr::call(std::string method, std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::kCall;
  e.text = std::move(method);
  e.kids = std::move(args);
  return e;
}

Expr Expr::method_call(Expr receiver, std::string method,
                       std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::kCall;
  e.text = std::move(method);
  e.flag = true;
  e.kids.reserve(args.size() + 1);
  e.kids.push_back(std::move(receiver));
  for (auto& a : args) e.kids.push_back(std::move(a));
  return e;
}

Expr Expr::field(Expr object, std::string name) {
  Expr e;
  e.kind = ExprKind::kField;
  e.text = std::move(name);
  e.kids.push_back(std::move(object));
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.flag != b.flag ||
      a.int_value != b.int_value) {
    return false;
  }
  if (a.kind == ExprKind::kDoubleLit) {
    bool both_nan = std::isnan(a.double_value) && std::isnan(b.double_value);
    if (!both_nan && a.double_value != b.double_value) return false;
  }
  return a.kids == b.kids;
}

Stmt Stmt::expr_stmt(Expr e) {
  Stmt s;
  s.kind = StmtKind::kExpr;
  s.exprs.push_back(std::move(e));
  return s;
}

Stmt Stmt::var_decl(std::string type, std::string name, Expr init) {
  Stmt s;
  s.kind = StmtKind::kVarDecl;
  s.type = std::move(type);
  s.name = std::move(name);
  s.exprs.push_back(std::move(init));
  return s;
}

bool operator==(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.type == b.type && a.name == b.name &&
         a.exprs == b.exprs && a.updates == b.updates && a.init == b.init &&
         a.body == b.body && a.alt == b.alt;
}

bool Method::has_annotation(const std::string& a) const {
  return std::find(annotations.begin(), annotations.end(), a) !=
         annotations.end();
}

bool operator==(const Method& a, const Method& b) {
  return a.annotations == b.annotations && a.is_public == b.is_public &&
         a.is_static == b.is_static && a.is_ctor == b.is_ctor &&
         a.return_type == b.return_type && a.name == b.name &&
         a.params == b.params && a.throws_list == b.throws_list &&
         a.body == b.body;
}

bool operator==(const Field& a, const Field& b) {
  return a.is_public == b.is_public && a.is_static == b.is_static &&
         a.is_final == b.is_final && a.type == b.type && a.name == b.name &&
         a.init == b.init;
}

const Method* ClassDecl::find_method(const std::string& n) const {
  for (const auto& m : methods) {
    if (!m.is_ctor && m.name == n) return &m;
  }
  return nullptr;
}

const Field* ClassDecl::find_field(const std::string& n) const {
  for (const auto& f : fields) {
    if (f.name == n) return &f;
  }
  return nullptr;
}

bool operator==(const ClassDecl& a, const ClassDecl& b) {
  return a.is_public == b.is_public && a.name == b.name &&
         a.fields == b.fields && a.methods == b.methods;
}

bool operator==(const CompilationUnit& a, const CompilationUnit& b) {
  return a.imports == b.imports && a.classes == b.classes;
}

bool is_primitive_type(const std::string& t) {
  return t == "int" || t == "long" || t == "double" || t == "boolean";
}

bool is_numeric_type(const std::string& t) {
  return t == "int" || t == "long" || t == "double";
}

void walk_exprs(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& k : e.kids) walk_exprs(k, fn);
}

void walk_exprs(Expr& e, const std::function<void(Expr&)>& fn) {
  fn(e);
  for (auto& k : e.kids) walk_exprs(k, fn);
}

void walk_own_exprs(const Stmt& s,
                    const std::function<void(const Expr&)>& fn) {
  for (const auto& i : s.init) walk_own_exprs(i, fn);
  for (const auto& e : s.exprs) fn(e);
  for (const auto& e : s.updates) fn(e);
}

void walk_own_exprs(Stmt& s, const std::function<void(Expr&)>& fn) {
  for (auto& i : s.init) walk_own_exprs(i, fn);
  for (auto& e : s.exprs) fn(e);
  for (auto& e : s.updates) fn(e);
}

void walk_stmts(const std::vector<Stmt>& stmts,
                const std::function<void(const Stmt&)>& fn) {
  for (const auto& s : stmts) {
    fn(s);
    walk_stmts(s.init, fn);
    walk_stmts(s.body, fn);
    walk_stmts(s.alt, fn);
  }
}

}  // namespace nvamp::lang
