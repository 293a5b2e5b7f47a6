#pragma once

#include <stdexcept>
#include <string>

namespace iam {

// Every failure the library reports is one of these two categories. The CLI
// maps Validation to exit code 1 and Io to exit code 2.
enum class ErrorCategory { Validation, Io };

class Error : public std::runtime_error {
 public:
  // `code` is a short machine-readable tag (e.g. "missing_model"), `detail`
  // names the offending field/model/coordinate.
  Error(ErrorCategory category, std::string code, std::string detail)
      : std::runtime_error(code + ": " + detail),
        category_(category),
        code_(std::move(code)),
        detail_(std::move(detail)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCategory category_;
  std::string code_;
  std::string detail_;
};

inline Error validation_error(std::string code, std::string detail) {
  return Error(ErrorCategory::Validation, std::move(code), std::move(detail));
}

inline Error io_error(std::string code, std::string detail) {
  return Error(ErrorCategory::Io, std::move(code), std::move(detail));
}

}  // namespace iam
