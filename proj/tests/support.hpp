#pragma once

// Shared helpers for the test binaries.

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "nvamp/errors.hpp"
#include "nvamp/executor.hpp"
#include "nvamp/program.hpp"
#include "nvamp/test_ir.hpp"

namespace nvamp::testing {

inline std::filesystem::path corpus_dir() { return NVAMP_CORPUS_DIR; }

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("nvamp-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Program program_of(const std::string& file, const std::string& source,
                          const std::string& id = "p") {
  return Program::from_sources({{file, source}}, id);
}

inline TestSuite suite_of(const std::string& file, const std::string& source) {
  return parse_test_sources({{file, source}});
}

inline RunOptions options_in(const TempDir& dir) {
  RunOptions o;
  o.scratch = dir.path() / "scratch";
  return o;
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected an nvamp::Error");
}

}  // namespace nvamp::testing
