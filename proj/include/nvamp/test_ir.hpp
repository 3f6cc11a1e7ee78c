#pragma once

// Language-neutral IR of a unit-test suite: tests are ordered statement
// lists with addressable literal slots and assertion markers.

#include <compare>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nvamp/lang/ast.hpp"

namespace nvamp {

enum class LiteralKind { kString, kInteger, kFloat, kBoolean };
std::string_view to_string(LiteralKind k);

struct SlotId {
  std::string test;
  int ordinal = 0;
  int slot = 0;

  std::string str() const;  // "test/ordinal/slot"
  auto operator<=>(const SlotId&) const = default;
};

struct LiteralSlot {
  SlotId id;
  LiteralKind kind = LiteralKind::kInteger;
  lang::Expr value;  // the literal node as it appears in source

  bool operator==(const LiteralSlot&) const = default;
};

enum class StatementKind { kSimple, kCompound, kAssertion };

struct Statement {
  int ordinal = 0;
  StatementKind kind = StatementKind::kSimple;
  // For compounds only the header (condition, for-init, updates) is kept
  // here; the body lives in `children`.
  lang::Stmt node;
  std::vector<Statement> children;
  std::string callee;  // assertions
  std::vector<LiteralSlot> literal_slots;
  bool from_assertion = false;  // hoisted out of a removed assertion

  const lang::Expr& assertion_call() const { return node.exprs.front(); }
  bool operator==(const Statement&) const;
};

enum class TransformKind {
  kStrRemove,
  kStrAdd,
  kStrReplace,
  kNumPlus1,
  kNumMinus1,
  kNumTimes2,
  kNumDiv2,
  kBoolNegate,
  kStmtRemove,
  kStmtDup,
  kTdrStack,
};
std::string_view to_string(TransformKind k);
/// CamelCase label used in generated test names ("StrAdd", "Add", ...).
std::string_view label(TransformKind k);

struct TransformationDescriptor {
  TransformKind kind = TransformKind::kStmtRemove;
  std::optional<SlotId> slot;  // literal transformations
  int ordinal = -1;            // statement transformations
  // TDR: the numeric steps in application order
  std::vector<std::pair<SlotId, TransformKind>> stack;

  /// "<Label>_<ordinal>[_<slot>]", unique among a parent's children.
  std::string name_suffix() const;
  bool operator==(const TransformationDescriptor&) const = default;
};

struct TestCase {
  std::string name;
  std::size_t file = 0;  // index into TestSuite::files
  std::vector<std::string> annotations{"Test"};
  bool is_public = true;
  std::vector<std::string> throws_list;
  std::vector<Statement> statements;
  bool generated = false;
  std::string parent;
  TransformationDescriptor transform;
  // Instrumented tests are rendered inside an exception guard.
  bool instrumented = false;

  bool operator==(const TestCase&) const;
};

struct TestFile {
  std::string path;  // relative to the tests directory
  std::string class_name;
  bool is_public = true;
  std::vector<lang::Import> imports;
  std::vector<lang::Field> fields;
  std::vector<lang::Method> helpers;  // every non-test member

  bool operator==(const TestFile&) const;
};

struct TestSuite {
  std::vector<TestFile> files;
  std::vector<TestCase> tests;

  const TestCase* find(const std::string& name) const;
  const std::string& source_origin(const TestCase& t) const {
    return files.at(t.file).path;
  }
  bool operator==(const TestSuite&) const = default;
};

/// Identity of the observation recording an escaping exception.
std::string exception_point_id(const std::string& test);

/// True iff the callee looks like an assertion and comes from the framework.
bool is_assertion(std::string_view callee_name, bool framework_provided);

/// Parses `<corpus_root>/tests/**.mj`. Throws PARSE_ERROR or
/// UNSUPPORTED_CONSTRUCT.
TestSuite parse_tests(const std::filesystem::path& corpus_root);
/// Parses test sources already in memory; `path` is used for diagnostics
/// and as the file's origin.
TestSuite parse_test_sources(
    const std::vector<std::pair<std::string, std::string>>& path_and_source);

/// Re-derives ordinals (pre-order) and literal slots after an edit.
void renumber(TestCase& test);

/// Visits every statement in pre-order.
void for_each_statement(const std::vector<Statement>& stmts,
                        const std::function<void(const Statement&)>& fn);
void for_each_statement(std::vector<Statement>& stmts,
                        const std::function<void(Statement&)>& fn);
std::size_t count_statements(const TestCase& test);

/// IR to AST.
lang::Method to_method(const TestCase& test);
lang::CompilationUnit to_unit(const TestSuite& suite, std::size_t file);
std::string render_file(const TestSuite& suite, std::size_t file);

/// Writes one source file per test file that has at least one test. Returns
/// the written paths in order. Throws RENDER_ERROR on malformed IR.
std::vector<std::filesystem::path> render_tests(const TestSuite& suite,
                                                const std::filesystem::path& out_root);

}  // namespace nvamp
