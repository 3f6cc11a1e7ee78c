#include "nvamp/lang/parser.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>

#include "nvamp/errors.hpp"
#include "nvamp/util.hpp"

namespace nvamp::lang {
namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "class", "import", "static", "public",   "private", "protected",
    "final", "new",    "this",   "null",     "true",    "false",
    "if",    "else",   "for",    "while",    "return",  "throw",
    "try",   "catch",  "break",  "continue", "throws",
};

[[noreturn]] void fail(const SourceLoc& loc, const std::string& msg) {
  throw Error(ErrorCode::kParseError, loc.str() + ": " + msg);
}

class Lexer {
 public:
  Lexer(std::string_view src, std::string file)
      : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {file_, line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = TokenKind::kEnd;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
          c == '$') {
        t.kind = TokenKind::kIdent;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_' || src_[pos_] == '$')) {
          t.text += advance();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        SourceLoc start{file_, line_, col_};
        advance();
        advance();
        while (pos_ + 1 < src_.size() &&
               !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
          advance();
        }
        if (pos_ + 1 >= src_.size()) fail(start, "unterminated comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& t) {
    bool is_double = false;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      t.text += advance();
    }
    if (pos_ < src_.size() && src_[pos_] == '.' && pos_ + 1 < src_.size() &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_double = true;
      t.text += advance();
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        t.text += advance();
      }
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      std::string exp(1, 'e');
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) {
        exp += src_[p++];
      }
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        is_double = true;
        while (pos_ < p) advance();
        t.text += exp;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          t.text += advance();
        }
      } else {
        pos_ = save;
      }
    }
    if (!is_double && pos_ < src_.size() &&
        (src_[pos_] == 'L' || src_[pos_] == 'l')) {
      advance();
      t.long_suffix = true;
    }
    if (is_double && pos_ < src_.size() &&
        (src_[pos_] == 'd' || src_[pos_] == 'D')) {
      advance();
    }
    t.kind = is_double ? TokenKind::kDouble : TokenKind::kInt;
  }

  static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  void lex_string(Token& t) {
    t.kind = TokenKind::kString;
    advance();
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        fail(t.loc, "unterminated string literal");
      }
      char c = advance();
      if (c == '"') break;
      if (c != '\\') {
        t.text += c;
        continue;
      }
      if (pos_ >= src_.size()) fail(t.loc, "unterminated string literal");
      char e = advance();
      switch (e) {
        case 'n': t.text += '\n'; break;
        case 't': t.text += '\t'; break;
        case 'r': t.text += '\r'; break;
        case 'b': t.text += '\b'; break;
        case 'f': t.text += '\f'; break;
        case '0': t.text += '\0'; break;
        case '\\': t.text += '\\'; break;
        case '"': t.text += '"'; break;
        case '\'': t.text += '\''; break;
        case 'u': {
          char32_t cp = 0;
          for (int i = 0; i < 4; ++i) {
            int h = pos_ < src_.size() ? hex_value(src_[pos_]) : -1;
            if (h < 0) fail(t.loc, "malformed \\u escape");
            advance();
            cp = cp * 16 + static_cast<char32_t>(h);
          }
          utf8_append(t.text, cp);
          break;
        }
        default:
          fail(t.loc, std::string("unknown escape \\") + e);
      }
    }
  }

  void lex_punct(Token& t) {
    static const std::array<const char*, 13> kTwo = {
        "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "++",
        "--", "%="};
    t.kind = TokenKind::kPunct;
    if (pos_ + 1 < src_.size()) {
      std::string two(src_.substr(pos_, 2));
      for (const char* op : kTwo) {
        if (two == op) {
          advance();
          advance();
          t.text = two;
          return;
        }
      }
    }
    static const std::string kOne = "(){}[];,.@=<>+-*/%!?:";
    char c = src_[pos_];
    if (kOne.find(c) == std::string::npos) {
      fail(t.loc, std::string("unexpected character '") + c + "'");
    }
    t.text = std::string(1, advance());
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  CompilationUnit unit(const std::string& file) {
    CompilationUnit u;
    u.file = file;
    while (is_ident("import")) u.imports.push_back(import_decl());
    while (!at_end()) u.classes.push_back(class_decl());
    return u;
  }

  Expr whole_expression() {
    Expr e = expression();
    expect_end();
    return e;
  }

  std::vector<Stmt> whole_statements() {
    std::vector<Stmt> out;
    while (!at_end()) out.push_back(statement());
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokenKind::kEnd; }
  bool is_punct(const char* p, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::kPunct && peek(ahead).text == p;
  }
  bool is_ident(const char* w, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::kIdent && peek(ahead).text == w;
  }
  bool is_plain_ident(std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::kIdent &&
           !kKeywords.count(peek(ahead).text);
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void expect_punct(const char* p) {
    if (!is_punct(p)) {
      fail(peek().loc, std::string("expected '") + p + "' but found '" +
                           describe(peek()) + "'");
    }
    take();
  }
  void expect_keyword(const char* w) {
    if (!is_ident(w)) {
      fail(peek().loc, std::string("expected '") + w + "'");
    }
    take();
  }
  std::string expect_ident() {
    if (!is_plain_ident()) {
      fail(peek().loc, "expected identifier but found '" + describe(peek()) +
                           "'");
    }
    return take().text;
  }
  void expect_end() {
    if (!at_end()) fail(peek().loc, "unexpected '" + describe(peek()) + "'");
  }
  static std::string describe(const Token& t) {
    return t.kind == TokenKind::kEnd ? "end of input" : t.text;
  }

  std::string qualified_name() {
    std::string name = expect_ident();
    while (is_punct(".") && is_plain_ident(1)) {
      take();
      name += "." + take().text;
    }
    return name;
  }

  Import import_decl() {
    expect_keyword("import");
    Import imp;
    if (is_ident("static")) {
      take();
      imp.is_static = true;
    }
    imp.path = qualified_name();
    if (is_punct(".") && is_punct("*", 1)) {
      take();
      take();
      imp.wildcard = true;
    }
    expect_punct(";");
    return imp;
  }

  struct Modifiers {
    bool is_public = false, is_static = false, is_final = false;
    std::vector<std::string> annotations;
  };

  Modifiers modifiers() {
    Modifiers m;
    for (;;) {
      if (is_punct("@")) {
        take();
        m.annotations.push_back(expect_ident());
      } else if (is_ident("public")) {
        take();
        m.is_public = true;
      } else if (is_ident("private") || is_ident("protected")) {
        take();
      } else if (is_ident("static")) {
        take();
        m.is_static = true;
      } else if (is_ident("final")) {
        take();
        m.is_final = true;
      } else {
        return m;
      }
    }
  }

  ClassDecl class_decl() {
    Modifiers mods = modifiers();
    ClassDecl c;
    c.loc = peek().loc;
    expect_keyword("class");
    c.is_public = mods.is_public;
    c.name = expect_ident();
    expect_punct("{");
    while (!is_punct("}")) {
      if (at_end()) fail(peek().loc, "unterminated class body");
      member(c);
    }
    expect_punct("}");
    return c;
  }

  void member(ClassDecl& c) {
    Modifiers mods = modifiers();
    SourceLoc loc = peek().loc;
    if (is_plain_ident() && peek().text == c.name && is_punct("(", 1)) {
      Method m;
      m.loc = loc;
      m.is_ctor = true;
      m.is_public = mods.is_public;
      m.annotations = mods.annotations;
      m.name = take().text;
      m.return_type = "void";
      method_rest(m);
      c.methods.push_back(std::move(m));
      return;
    }
    std::string type = expect_ident();
    std::string name = expect_ident();
    if (is_punct("(")) {
      Method m;
      m.loc = loc;
      m.is_public = mods.is_public;
      m.is_static = mods.is_static;
      m.annotations = mods.annotations;
      m.return_type = type;
      m.name = name;
      method_rest(m);
      c.methods.push_back(std::move(m));
      return;
    }
    Field f;
    f.loc = loc;
    f.is_public = mods.is_public;
    f.is_static = mods.is_static;
    f.is_final = mods.is_final;
    f.type = type;
    f.name = name;
    if (is_punct("=")) {
      take();
      f.init.push_back(expression());
    }
    expect_punct(";");
    c.fields.push_back(std::move(f));
  }

  void method_rest(Method& m) {
    expect_punct("(");
    if (!is_punct(")")) {
      for (;;) {
        modifiers();
        Param p;
        p.type = expect_ident();
        p.name = expect_ident();
        m.params.push_back(std::move(p));
        if (!is_punct(",")) break;
        take();
      }
    }
    expect_punct(")");
    if (is_ident("throws")) {
      take();
      m.throws_list.push_back(qualified_name());
      while (is_punct(",")) {
        take();
        m.throws_list.push_back(qualified_name());
      }
    }
    m.body = block();
  }

  std::vector<Stmt> block() {
    expect_punct("{");
    std::vector<Stmt> out;
    while (!is_punct("}")) {
      if (at_end()) fail(peek().loc, "unterminated block");
      out.push_back(statement());
    }
    expect_punct("}");
    return out;
  }

  // Body of if/for/while: braces optional in source, always a list in the AST.
  std::vector<Stmt> sub_body() {
    if (is_punct("{")) return block();
    std::vector<Stmt> out;
    out.push_back(statement());
    return out;
  }

  bool at_var_decl() const {
    return is_plain_ident() && is_plain_ident(1) &&
           (is_punct("=", 2) || is_punct(";", 2));
  }

  Stmt var_decl_no_semi() {
    Stmt s;
    s.loc = peek().loc;
    s.kind = StmtKind::kVarDecl;
    s.type = take().text;
    s.name = take().text;
    if (is_punct("=")) {
      take();
      s.exprs.push_back(expression());
    }
    return s;
  }

  Stmt statement() {
    SourceLoc loc = peek().loc;
    Stmt s;
    s.loc = loc;
    if (is_punct("{")) {
      s.kind = StmtKind::kBlock;
      s.body = block();
      return s;
    }
    if (is_ident("final") && is_plain_ident(1)) take();
    if (at_var_decl()) {
      s = var_decl_no_semi();
      expect_punct(";");
      return s;
    }
    if (is_ident("if")) {
      take();
      s.kind = StmtKind::kIf;
      expect_punct("(");
      s.exprs.push_back(expression());
      expect_punct(")");
      s.body = sub_body();
      if (is_ident("else")) {
        take();
        s.alt = sub_body();
      }
      return s;
    }
    if (is_ident("for")) {
      take();
      s.kind = StmtKind::kFor;
      expect_punct("(");
      if (!is_punct(";")) {
        if (at_var_decl()) {
          s.init.push_back(var_decl_no_semi());
        } else {
          Stmt e = Stmt::expr_stmt(expression());
          e.loc = loc;
          s.init.push_back(std::move(e));
        }
      }
      expect_punct(";");
      if (!is_punct(";")) s.exprs.push_back(expression());
      expect_punct(";");
      if (!is_punct(")")) {
        s.updates.push_back(expression());
        while (is_punct(",")) {
          take();
          s.updates.push_back(expression());
        }
      }
      expect_punct(")");
      s.body = sub_body();
      return s;
    }
    if (is_ident("while")) {
      take();
      s.kind = StmtKind::kWhile;
      expect_punct("(");
      s.exprs.push_back(expression());
      expect_punct(")");
      s.body = sub_body();
      return s;
    }
    if (is_ident("return")) {
      take();
      s.kind = StmtKind::kReturn;
      if (!is_punct(";")) s.exprs.push_back(expression());
      expect_punct(";");
      return s;
    }
    if (is_ident("throw")) {
      take();
      s.kind = StmtKind::kThrow;
      s.exprs.push_back(expression());
      expect_punct(";");
      return s;
    }
    if (is_ident("try")) {
      take();
      s.kind = StmtKind::kTry;
      s.body = block();
      expect_keyword("catch");
      expect_punct("(");
      s.type = qualified_name();
      s.name = expect_ident();
      expect_punct(")");
      s.alt = block();
      return s;
    }
    if (is_ident("break") || is_ident("continue")) {
      s.kind = take().text == "break" ? StmtKind::kBreak : StmtKind::kContinue;
      expect_punct(";");
      return s;
    }
    s.kind = StmtKind::kExpr;
    s.exprs.push_back(expression());
    expect_punct(";");
    return s;
  }

  Expr expression() { return assignment(); }

  Expr assignment() {
    Expr lhs = logical_or();
    if (peek().kind == TokenKind::kPunct &&
        (peek().text == "=" || peek().text == "+=" || peek().text == "-=" ||
         peek().text == "*=" || peek().text == "/=" || peek().text == "%=")) {
      Token op = take();
      if (lhs.kind != ExprKind::kName && lhs.kind != ExprKind::kField) {
        fail(op.loc, "invalid assignment target");
      }
      Expr e;
      e.kind = ExprKind::kAssign;
      e.text = op.text;
      e.loc = op.loc;
      e.kids.push_back(std::move(lhs));
      e.kids.push_back(assignment());
      return e;
    }
    return lhs;
  }

  Expr binary(Expr lhs, const Token& op, Expr rhs) {
    Expr e;
    e.kind = ExprKind::kBinary;
    e.text = op.text;
    e.loc = op.loc;
    e.kids.push_back(std::move(lhs));
    e.kids.push_back(std::move(rhs));
    return e;
  }

  template <typename Next>
  Expr left_assoc(std::initializer_list<const char*> ops, Next next) {
    Expr lhs = (this->*next)();
    for (;;) {
      bool matched = false;
      for (const char* op : ops) {
        if (is_punct(op)) {
          Token t = take();
          lhs = binary(std::move(lhs), t, (this->*next)());
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  Expr logical_or() { return left_assoc({"||"}, &Parser::logical_and); }
  Expr logical_and() { return left_assoc({"&&"}, &Parser::equality); }
  Expr equality() { return left_assoc({"==", "!="}, &Parser::relational); }
  Expr relational() {
    return left_assoc({"<=", ">=", "<", ">"}, &Parser::additive);
  }
  Expr additive() { return left_assoc({"+", "-"}, &Parser::multiplicative); }
  Expr multiplicative() { return left_assoc({"*", "/", "%"}, &Parser::unary); }

  Expr number_literal(const Token& t, bool negate) {
    Expr e;
    e.loc = t.loc;
    if (t.kind == TokenKind::kDouble) {
      e.kind = ExprKind::kDoubleLit;
      double v = std::stod(t.text);
      e.double_value = negate ? -v : v;
      return e;
    }
    std::uint64_t mag = 0;
    auto [p, ec] =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
    if (ec != std::errc()) fail(t.loc, "integer literal out of range");
    const std::uint64_t limit =
        t.long_suffix
            ? static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())
            : static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max());
    if (mag > limit + (negate ? 1 : 0)) {
      fail(t.loc, "integer literal out of range: " + t.text);
    }
    e.kind = t.long_suffix ? ExprKind::kLongLit : ExprKind::kIntLit;
    e.int_value = negate ? static_cast<std::int64_t>(0 - mag)
                         : static_cast<std::int64_t>(mag);
    return e;
  }

  Expr unary() {
    if (is_punct("-") && (peek(1).kind == TokenKind::kInt ||
                          peek(1).kind == TokenKind::kDouble)) {
      take();
      Token t = take();
      return postfix(number_literal(t, true));
    }
    if (is_punct("-") || is_punct("!")) {
      Token op = take();
      Expr e;
      e.kind = ExprKind::kUnary;
      e.text = op.text;
      e.loc = op.loc;
      e.kids.push_back(unary());
      return e;
    }
    if (is_punct("++") || is_punct("--")) {
      Token op = take();
      Expr e;
      e.kind = ExprKind::kIncDec;
      e.text = op.text;
      e.flag = true;
      e.loc = op.loc;
      e.kids.push_back(unary());
      return e;
    }
    if (is_punct("(") && peek(1).kind == TokenKind::kIdent &&
        is_primitive_type(peek(1).text) && is_punct(")", 2)) {
      Token open = take();
      Expr e;
      e.kind = ExprKind::kCast;
      e.text = take().text;
      e.loc = open.loc;
      take();
      e.kids.push_back(unary());
      return e;
    }
    return postfix(primary());
  }

  std::vector<Expr> arguments() {
    expect_punct("(");
    std::vector<Expr> args;
    if (!is_punct(")")) {
      args.push_back(expression());
      while (is_punct(",")) {
        take();
        args.push_back(expression());
      }
    }
    expect_punct(")");
    return args;
  }

  Expr postfix(Expr e) {
    for (;;) {
      if (is_punct(".")) {
        Token dot = take();
        std::string name = expect_ident();
        if (is_punct("(")) {
          e = Expr::method_call(std::move(e), name, arguments());
        } else {
          e = Expr::field(std::move(e), name);
        }
        e.loc = dot.loc;
      } else if (is_punct("++") || is_punct("--")) {
        Token op = take();
        Expr inc;
        inc.kind = ExprKind::kIncDec;
        inc.text = op.text;
        inc.loc = op.loc;
        inc.kids.push_back(std::move(e));
        e = std::move(inc);
      } else {
        return e;
      }
    }
  }

  Expr primary() {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    if (t.kind == TokenKind::kInt || t.kind == TokenKind::kDouble) {
      Token tok = take();
      return number_literal(tok, false);
    }
    if (t.kind == TokenKind::kString) {
      Expr e = Expr::string_lit(take().text);
      e.loc = loc;
      return e;
    }
    if (is_punct("(")) {
      take();
      Expr e = expression();
      expect_punct(")");
      return e;
    }
    if (is_ident("true") || is_ident("false")) {
      Expr e = Expr::bool_lit(take().text == "true");
      e.loc = loc;
      return e;
    }
    if (is_ident("null")) {
      take();
      Expr e = Expr::null_lit();
      e.loc = loc;
      return e;
    }
    if (is_ident("this")) {
      take();
      Expr e;
      e.kind = ExprKind::kThis;
      e.loc = loc;
      return e;
    }
    if (is_ident("new")) {
      take();
      Expr e;
      e.kind = ExprKind::kNew;
      e.text = qualified_name();
      e.loc = loc;
      e.kids = arguments();
      return e;
    }
    if (is_plain_ident()) {
      std::string name = take().text;
      Expr e = is_punct("(") ? Expr::call(name, arguments()) : Expr::name(name);
      e.loc = loc;
      return e;
    }
    fail(loc, "unexpected '" + describe(t) + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& file) {
  return Lexer(source, file).run();
}

CompilationUnit parse_unit(std::string_view source, const std::string& file) {
  return Parser(tokenize(source, file)).unit(file);
}

Expr parse_expression(std::string_view source) {
  return Parser(tokenize(source, "<expr>")).whole_expression();
}

std::vector<Stmt> parse_statements(std::string_view source) {
  return Parser(tokenize(source, "<stmts>")).whole_statements();
}

}  // namespace nvamp::lang
