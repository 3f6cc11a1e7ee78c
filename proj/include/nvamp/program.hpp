#pragma once

// A program under test: the MiniJ sources of one variant, plus the global
// statement numbering shared by coverage measurement and transplantation.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nvamp/lang/ast.hpp"
#include "nvamp/lang/interpreter.hpp"

namespace nvamp {

struct Program {
  std::string id;
  std::vector<lang::CompilationUnit> units;  // sorted by file path

  /// Parses every `.mj` file under `src_dir`. Throws PARSE_ERROR.
  static Program load(const std::filesystem::path& src_dir, std::string id);
  static Program from_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                              std::string id);

  /// Content key over the canonical rendering of all units.
  std::string digest() const;
  std::vector<std::shared_ptr<const lang::CompilationUnit>> shared_units() const;
  /// Writes each unit, canonically rendered, under `dir`.
  void write(const std::filesystem::path& dir) const;
};

struct ScopedVar {
  std::string name;
  std::string type;
  bool operator==(const ScopedVar&) const = default;
};

/// One statement of a method or constructor body. Ids are assigned in
/// pre-order over all units (in path order), classes, and members.
struct StatementSite {
  int id = 0;
  std::size_t unit = 0;
  std::string cls;
  std::string method;
  std::size_t arity = 0;
  bool in_static = false;
  std::string return_type;  // of the enclosing method; empty for constructors
  const lang::Stmt* stmt = nullptr;
  std::vector<ScopedVar> scope;  // visible before the statement, inner last
};

/// Sites are valid while `units` is unmodified.
std::vector<StatementSite> statement_sites(const std::vector<lang::CompilationUnit>& units);

/// Calls `fn` with the statement list holding statement `id` and its index.
/// Returns false when no statement has that id.
bool edit_statement(std::vector<lang::CompilationUnit>& units, int id,
                    const std::function<void(std::vector<lang::Stmt>&, std::size_t)>& fn);

/// Copy of the program with `Coverage.hit(<id>);` ahead of every statement.
Program with_coverage(const Program& program);

/// Names a statement reads or writes that are not declared inside it.
std::vector<std::string> free_variables(const lang::Stmt& s);

}  // namespace nvamp
