#pragma once

#include <stdexcept>
#include <string>

namespace chainflow {

/// Base error for the library. `code()` is a stable identifier such as
/// "CycleDetected" or "MaskOutOfRange"; `detail()` is human-readable.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)), detail_(std::move(detail)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

/// A document failed schema validation; `path()` names the failing field, e.g. "sims[2][2]".
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string path, std::string detail)
      : Error("SchemaViolation", path + ": " + detail), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace chainflow
