#pragma once

// AST for MiniJ, the small Java-like language in which both programs under
// test and their unit tests are written. Nodes are plain values: copying a
// node deep-copies the subtree, and equality ignores source locations.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nvamp::lang {

struct SourceLoc {
  std::string file;
  int line = 0;
  int column = 0;

  std::string str() const;
};

enum class ExprKind {
  kIntLit,     // int_value, 32-bit range
  kLongLit,    // int_value, "L" suffix
  kDoubleLit,  // double_value
  kStringLit,  // text holds the decoded value
  kBoolLit,    // flag
  kNullLit,
  kName,       // text = identifier
  kThis,
  kField,      // kids[0] = object, text = field name
  kCall,       // text = method; flag = has receiver (kids[0]); rest are args
  kNew,        // text = class name, kids = args
  kUnary,      // text = "-" or "!"
  kBinary,     // text = operator
  kAssign,     // text = "=", "+=", "-=", "*=", "/="
  kIncDec,     // text = "++"/"--", flag = prefix
  kCast,       // text = target primitive type
};

struct Expr {
  ExprKind kind = ExprKind::kNullLit;
  std::string text;
  std::int64_t int_value = 0;
  double double_value = 0.0;
  bool flag = false;
  std::vector<Expr> kids;
  SourceLoc loc;

  bool is_literal() const;
  bool has_receiver() const { return kind == ExprKind::kCall && flag; }
  const Expr& receiver() const { return kids.front(); }
  std::size_t arg_begin() const { return has_receiver() ? 1 : 0; }
  std::size_t arg_count() const { return kids.size() - arg_begin(); }
  const Expr& arg(std::size_t i) const { return kids[arg_begin() + i]; }

  static Expr int_lit(std::int64_t v);
  static Expr long_lit(std::int64_t v);
  static Expr double_lit(double v);
  static Expr string_lit(std::string v);
  static Expr bool_lit(bool v);
  static Expr null_lit();
  static Expr name(std::string id);
  static Expr call(std::string method, std::vector<Expr> args);
  static Expr method_call(Expr receiver, std::string method,
                          std::vector<Expr> args);
  static Expr field(Expr object, std::string name);
};

bool operator==(const Expr& a, const Expr& b);

enum class StmtKind {
  kVarDecl,   // type, name, exprs = [init]?
  kExpr,      // exprs = [expression]
  kIf,        // exprs = [cond], body = then, alt = else
  kFor,       // init = [decl or expr stmt]?, exprs = [cond]?, updates, body
  kWhile,     // exprs = [cond], body
  kBlock,     // body
  kReturn,    // exprs = [value]?
  kThrow,     // exprs = [value]
  kTry,       // body = try block, type/name = catch clause, alt = handler
  kBreak,
  kContinue,
};

struct Stmt {
  StmtKind kind = StmtKind::kBlock;
  std::string type;
  std::string name;
  std::vector<Expr> exprs;
  std::vector<Expr> updates;
  std::vector<Stmt> init;
  std::vector<Stmt> body;
  std::vector<Stmt> alt;
  SourceLoc loc;

  static Stmt expr_stmt(Expr e);
  static Stmt var_decl(std::string type, std::string name, Expr init);
};

bool operator==(const Stmt& a, const Stmt& b);

struct Param {
  std::string type;
  std::string name;
  bool operator==(const Param&) const = default;
};

struct Method {
  std::vector<std::string> annotations;
  bool is_public = false;
  bool is_static = false;
  bool is_ctor = false;
  std::string return_type;
  std::string name;
  std::vector<Param> params;
  std::vector<std::string> throws_list;
  std::vector<Stmt> body;
  SourceLoc loc;

  bool has_annotation(const std::string& a) const;
};

bool operator==(const Method& a, const Method& b);

struct Field {
  bool is_public = false;
  bool is_static = false;
  bool is_final = false;
  std::string type;
  std::string name;
  std::vector<Expr> init;
  SourceLoc loc;
};

bool operator==(const Field& a, const Field& b);

struct ClassDecl {
  bool is_public = false;
  std::string name;
  std::vector<Field> fields;
  std::vector<Method> methods;
  SourceLoc loc;

  const Method* find_method(const std::string& name) const;
  const Field* find_field(const std::string& name) const;
};

bool operator==(const ClassDecl& a, const ClassDecl& b);

struct Import {
  bool is_static = false;
  std::string path;  // dotted, without the trailing ".*"
  bool wildcard = false;
  bool operator==(const Import&) const = default;
};

struct CompilationUnit {
  std::string file;
  std::vector<Import> imports;
  std::vector<ClassDecl> classes;
};

bool operator==(const CompilationUnit& a, const CompilationUnit& b);

bool is_primitive_type(const std::string& t);
bool is_numeric_type(const std::string& t);

// Pre-order traversal helpers. Callbacks see each node exactly once.
void walk_exprs(const Expr& e, const std::function<void(const Expr&)>& fn);
void walk_exprs(Expr& e, const std::function<void(Expr&)>& fn);
/// Root expressions of `s` and its for-init statements; not descendants,
/// not body or alt statements.
void walk_own_exprs(const Stmt& s, const std::function<void(const Expr&)>& fn);
void walk_own_exprs(Stmt& s, const std::function<void(Expr&)>& fn);
void walk_stmts(const std::vector<Stmt>& stmts,
                const std::function<void(const Stmt&)>& fn);

}  // namespace nvamp::lang
