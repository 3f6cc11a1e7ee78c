#pragma once

// Static build check for MiniJ: the stand-in for compilation. It rejects
// unresolved names, redeclared locals, unknown methods or constructors,
// missing returns and unreachable statements.

#include <set>
#include <string>
#include <vector>

#include "nvamp/lang/interpreter.hpp"

namespace nvamp::lang {

struct Diagnostic {
  std::string cls;
  std::string method;  // empty for class-level problems (field initializers)
  std::size_t arity = 0;
  bool in_test = false;  // inside a @Test method
  std::string message;
};

std::vector<Diagnostic> check_class(const Image& image, const ClassInfo& cls);

/// Test methods of `cls` that cannot be built. A broken helper or field
/// initializer breaks every test; a test calling a broken test is broken too.
std::set<std::string> broken_tests(const Image& image, const ClassInfo& cls,
                                   std::vector<Diagnostic>* diagnostics = nullptr);

}  // namespace nvamp::lang
