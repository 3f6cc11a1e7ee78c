#include "nvamp/lang/printer.hpp"

#include <cmath>
#include <cstdio>

#include "nvamp/util.hpp"

namespace nvamp::lang {
namespace {

int binary_precedence(const std::string& op) {
  if (op == "||") return 2;
  if (op == "&&") return 3;
  if (op == "==" || op == "!=") return 4;
  if (op == "<" || op == ">" || op == "<=" || op == ">=") return 5;
  if (op == "+" || op == "-") return 6;
  return 7;  // * / %
}

constexpr int kAssignPrec = 1;
constexpr int kUnaryPrec = 8;
constexpr int kPostfixPrec = 9;
constexpr int kPrimaryPrec = 10;

bool is_negative_literal(const Expr& e) {
  if (e.kind == ExprKind::kIntLit || e.kind == ExprKind::kLongLit) {
    return e.int_value < 0;
  }
  return e.kind == ExprKind::kDoubleLit && std::signbit(e.double_value);
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kAssign: return kAssignPrec;
    case ExprKind::kBinary: return binary_precedence(e.text);
    case ExprKind::kUnary:
    case ExprKind::kCast:
      return kUnaryPrec;
    case ExprKind::kIncDec: return e.flag ? kUnaryPrec : kPostfixPrec;
    case ExprKind::kField:
    case ExprKind::kCall:
      return kPostfixPrec;
    default:
      // A negative literal reparses as unary minus folded into the literal,
      // which binds like a unary operator.
      return is_negative_literal(e) ? kUnaryPrec : kPrimaryPrec;
  }
}

std::string wrap(const Expr& e, int min_prec) {
  std::string s = print_expr(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string print_double(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eEnI") == std::string::npos) s += ".0";
  return s;
}

std::string args_list(const Expr& e, std::size_t begin) {
  std::string out = "(";
  for (std::size_t i = begin; i < e.kids.size(); ++i) {
    if (i > begin) out += ", ";
    out += print_expr(e.kids[i]);
  }
  return out + ")";
}

std::string pad(int indent) { return std::string(indent * 2, ' '); }

void print_body(std::string& out, const std::vector<Stmt>& body, int indent) {
  out += "{\n";
  for (const auto& s : body) out += print_stmt(s, indent + 1);
  out += pad(indent) + "}";
}

std::string header_stmt(const Stmt& s) {
  // for-init without the trailing semicolon
  std::string text = print_stmt(s, 0);
  while (!text.empty() && (text.back() == '\n' || text.back() == ';')) {
    text.pop_back();
  }
  return text;
}

}  // namespace

std::string quote_string(const std::string& value) {
  std::string out = "\"";
  for (char32_t cp : utf8_decode(value)) {
    switch (cp) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default:
        if (cp < 0x20 || cp == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(cp));
          out += buf;
        } else {
          utf8_append(out, cp);
        }
    }
  }
  return out + "\"";
}

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kIntLit: return std::to_string(e.int_value);
    case ExprKind::kLongLit: return std::to_string(e.int_value) + "L";
    case ExprKind::kDoubleLit: return print_double(e.double_value);
    case ExprKind::kStringLit: return quote_string(e.text);
    case ExprKind::kBoolLit: return e.flag ? "true" : "false";
    case ExprKind::kNullLit: return "null";
    case ExprKind::kName: return e.text;
    case ExprKind::kThis: return "this";
    case ExprKind::kField:
      return wrap(e.kids[0], kPostfixPrec) + "." + e.text;
    case ExprKind::kCall:
      if (e.has_receiver()) {
        return wrap(e.kids[0], kPostfixPrec) + "." + e.text + args_list(e, 1);
      }
      return e.text + args_list(e, 0);
    case ExprKind::kNew: return "new " + e.text + args_list(e, 0);
    case ExprKind::kUnary: {
      const Expr& operand = e.kids[0];
      std::string inner = wrap(operand, kUnaryPrec);
      bool needs_paren =
          e.text == "-" && (is_negative_literal(operand) ||
                            (operand.kind == ExprKind::kUnary &&
                             operand.text == "-") ||
                            (operand.kind == ExprKind::kIncDec &&
                             operand.flag && operand.text == "--") ||
                            (operand.kind == ExprKind::kIntLit ||
                             operand.kind == ExprKind::kLongLit ||
                             operand.kind == ExprKind::kDoubleLit));
      if (needs_paren && inner.front() != '(') inner = "(" + inner + ")";
      return e.text + inner;
    }
    case ExprKind::kCast:
      return "(" + e.text + ") " + wrap(e.kids[0], kUnaryPrec);
    case ExprKind::kIncDec:
      if (e.flag) return e.text + wrap(e.kids[0], kUnaryPrec);
      return wrap(e.kids[0], kPostfixPrec) + e.text;
    case ExprKind::kBinary: {
      int p = binary_precedence(e.text);
      return wrap(e.kids[0], p) + " " + e.text + " " + wrap(e.kids[1], p + 1);
    }
    case ExprKind::kAssign:
      return wrap(e.kids[0], kPostfixPrec) + " " + e.text + " " +
             wrap(e.kids[1], kAssignPrec);
  }
  return "";
}

std::string print_stmt(const Stmt& s, int indent) {
  std::string out = pad(indent);
  switch (s.kind) {
    case StmtKind::kVarDecl:
      out += s.type + " " + s.name;
      if (!s.exprs.empty()) out += " = " + print_expr(s.exprs[0]);
      out += ";";
      break;
    case StmtKind::kExpr:
      out += print_expr(s.exprs[0]) + ";";
      break;
    case StmtKind::kIf:
      out += "if (" + print_expr(s.exprs[0]) + ") ";
      print_body(out, s.body, indent);
      if (!s.alt.empty()) {
        out += " else ";
        print_body(out, s.alt, indent);
      }
      break;
    case StmtKind::kFor: {
      out += "for (";
      if (!s.init.empty()) out += header_stmt(s.init[0]);
      out += ";";
      if (!s.exprs.empty()) out += " " + print_expr(s.exprs[0]);
      out += ";";
      for (std::size_t i = 0; i < s.updates.size(); ++i) {
        out += i ? ", " : " ";
        out += print_expr(s.updates[i]);
      }
      out += ") ";
      print_body(out, s.body, indent);
      break;
    }
    case StmtKind::kWhile:
      out += "while (" + print_expr(s.exprs[0]) + ") ";
      print_body(out, s.body, indent);
      break;
    case StmtKind::kBlock:
      print_body(out, s.body, indent);
      break;
    case StmtKind::kReturn:
      out += s.exprs.empty() ? "return;" : "return " + print_expr(s.exprs[0]) + ";";
      break;
    case StmtKind::kThrow:
      out += "throw " + print_expr(s.exprs[0]) + ";";
      break;
    case StmtKind::kTry:
      out += "try ";
      print_body(out, s.body, indent);
      out += " catch (" + s.type + " " + s.name + ") ";
      print_body(out, s.alt, indent);
      break;
    case StmtKind::kBreak: out += "break;"; break;
    case StmtKind::kContinue: out += "continue;"; break;
  }
  return out + "\n";
}

std::string print_method(const Method& m, int indent) {
  std::string out;
  for (const auto& a : m.annotations) out += pad(indent) + "@" + a + "\n";
  out += pad(indent);
  if (m.is_public) out += "public ";
  if (m.is_static) out += "static ";
  if (!m.is_ctor) out += m.return_type + " ";
  out += m.name + "(";
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    if (i) out += ", ";
    out += m.params[i].type + " " + m.params[i].name;
  }
  out += ")";
  if (!m.throws_list.empty()) out += " throws " + join(m.throws_list, ", ");
  out += " ";
  print_body(out, m.body, indent);
  return out + "\n";
}

std::string print_class(const ClassDecl& c) {
  std::string out = c.is_public ? "public class " : "class ";
  out += c.name + " {\n";
  for (const auto& f : c.fields) {
    out += pad(1);
    if (f.is_public) out += "public ";
    if (f.is_static) out += "static ";
    if (f.is_final) out += "final ";
    out += f.type + " " + f.name;
    if (!f.init.empty()) out += " = " + print_expr(f.init[0]);
    out += ";\n";
  }
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    if (i || !c.fields.empty()) out += "\n";
    out += print_method(c.methods[i], 1);
  }
  return out + "}\n";
}

std::string print_unit(const CompilationUnit& u) {
  std::string out;
  for (const auto& imp : u.imports) {
    out += "import ";
    if (imp.is_static) out += "static ";
    out += imp.path;
    if (imp.wildcard) out += ".*";
    out += ";\n";
  }
  for (std::size_t i = 0; i < u.classes.size(); ++i) {
    if (i || !u.imports.empty()) out += "\n";
    out += print_class(u.classes[i]);
  }
  return out;
}

}  // namespace nvamp::lang
