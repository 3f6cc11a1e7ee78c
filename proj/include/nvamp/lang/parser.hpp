#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nvamp/lang/ast.hpp"

namespace nvamp::lang {

enum class TokenKind {
  kIdent,
  kInt,     // text holds digits; long_suffix marks "L"
  kDouble,
  kString,  // text holds the decoded value
  kPunct,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  bool long_suffix = false;
  SourceLoc loc;
};

/// Throws Error(kParseError) on malformed input.
std::vector<Token> tokenize(std::string_view source, const std::string& file);

/// Parses one MiniJ source file. Throws Error(kParseError) with a
/// "file:line:col" prefix on malformed input.
CompilationUnit parse_unit(std::string_view source, const std::string& file);

Expr parse_expression(std::string_view source);
std::vector<Stmt> parse_statements(std::string_view source);

}  // namespace nvamp::lang
