#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nvamp {

enum class ErrorCode {
  kParseError,
  kUnsupportedConstruct,
  kRenderError,
  kBuildError,
  kInstrumentationError,
  kExecutionError,
  kTraceMismatch,
  kEmptySet,
  kConfigError,
  kOriginalSuiteRed,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the toolkit carries one of the codes above so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace nvamp
