#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infodemic {

enum class ErrorCode {
  kEmptyRecord,
  kInvalidRecord,
  kInsufficientCorpus,
  kNoProfiles,
  kEmptyCorpus,
  kSingleClass,
  kUnknownQuestion,
  kUnknownTask,
  kUnknownLabel,
  kUnknownLanguage,
  kParseError,
  kLengthMismatch,
  kMissingModel,
  kMissingData,
  kInvalidDateRange,
  kSourceUnreadable,
  kIoError,
  kFormatError,
};

std::string_view to_string(ErrorCode code);

// Base exception for every library failure. `code()` is stable; the message
// is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace infodemic
