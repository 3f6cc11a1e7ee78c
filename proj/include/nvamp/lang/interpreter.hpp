#pragma once

// Tree-walking interpreter for MiniJ. One Interpreter instance executes one
// test (or one oracle probe) and owns all mutable state of that run, so
// concurrent runs never share anything but the immutable Image.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "nvamp/lang/ast.hpp"
#include "nvamp/lang/value.hpp"

namespace nvamp::lang {

struct ClassInfo {
  const ClassDecl* decl = nullptr;
  const CompilationUnit* unit = nullptr;
  std::string name;
  std::vector<const Field*> instance_fields;
  std::unordered_map<std::string, int> field_index;
  std::vector<const Field*> static_fields;
  std::unordered_map<std::string, int> static_index;
  // name -> methods (overloads differ by arity)
  std::unordered_map<std::string, std::vector<const Method*>> methods;
  std::vector<const Method*> ctors;

  const Method* find(const std::string& name, std::size_t arity) const;
  const Method* find_ctor(std::size_t arity) const;
  bool has_to_string() const { return find("toString", 0) != nullptr; }
  /// Unqualified assertion-style calls resolve to the test framework.
  bool imports_framework_static() const;
  bool imports_framework_class() const;
};

/// A set of compilation units linked into one namespace of classes.
struct Image {
  std::vector<std::shared_ptr<const CompilationUnit>> units;
  std::map<std::string, ClassInfo> classes;
  std::vector<const ClassInfo*> class_order;  // static init order

  const ClassInfo* find_class(const std::string& name) const;
};

/// Throws Error(kBuildError) on duplicate class names.
std::shared_ptr<const Image> link_image(
    std::vector<std::shared_ptr<const CompilationUnit>> units);

/// The host-visible environment of one run.
struct HostEnvironment {
  std::filesystem::path workdir;  // where file operations land
  // the directory programs see; defaults to `workdir`
  std::filesystem::path visible_workdir;
  std::map<std::string, std::string> vars;
  std::string locale = "C.UTF-8";
  std::string timezone = "UTC";
};

struct ObsRecord {
  std::string point_id;
  std::string value;
  bool exception = false;
  bool operator==(const ObsRecord&) const = default;
};

struct RunResult {
  // kBroken: the run hit a construct the static check should have rejected.
  enum class Status { kPassed, kFailed, kTimeout, kBroken };
  Status status = Status::kPassed;
  std::string failure;
  std::vector<ObsRecord> records;
  int assertions = 0;
  int test_invocations = 0;
  std::set<int> coverage;
};

/// A language-level exception escaping an oracle call.
struct LangException {
  Value exception;
  std::string describe() const;
};

class Interpreter {
 public:
  Interpreter(std::shared_ptr<const Image> image, HostEnvironment env,
              std::chrono::milliseconds timeout);
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Instantiates the test class and runs one test method.
  RunResult run_test(const std::string& cls, const std::string& method);

  // Direct entry points for the brute-force oracle. Language exceptions
  // surface as LangException; timeouts as Error(kExecutionError).
  Value construct(const std::string& cls, const std::vector<Value>& args);
  Value invoke(const Value& receiver, const std::string& method,
               const std::vector<Value>& args);
  Value invoke_static(const std::string& cls, const std::string& method,
                      const std::vector<Value>& args);

  /// Canonical observation rendering, honoring user toString().
  std::string render(const Value& v);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Builtin API surface shared with the static checker.
bool is_builtin_static_class(const std::string& name);
bool builtin_static_method(const std::string& cls, const std::string& method,
                           std::size_t arity);
bool builtin_static_field(const std::string& cls, const std::string& field);
bool is_builtin_type(const std::string& name);
bool builtin_member_method(const std::string& type, const std::string& method,
                           std::size_t arity);
/// Return type of a builtin member method, or "" when unknown.
std::string builtin_member_return(const std::string& type,
                                  const std::string& method);
bool is_exception_type(const std::string& name);
bool is_framework_method(const std::string& method);

}  // namespace nvamp::lang
