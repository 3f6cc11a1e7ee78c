#pragma once

#include <string>

#include "nvamp/lang/ast.hpp"

namespace nvamp::lang {

/// Canonical source rendering. parse(print(x)) == x for every parsed x.
std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);
std::string print_method(const Method& m, int indent = 0);
std::string print_class(const ClassDecl& c);
std::string print_unit(const CompilationUnit& u);

/// Source-literal spelling of a string value, including the quotes.
std::string quote_string(const std::string& value);

}  // namespace nvamp::lang
