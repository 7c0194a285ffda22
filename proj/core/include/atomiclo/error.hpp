#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atomiclo {

enum class ErrorCode {
  // taxonomy
  InvalidCodeFormat,
  DuplicateCode,
  MissingField,
  UnknownAction,
  UnknownCategory,
  InconsistentName,
  UnknownChapter,
  // corpus
  UnknownLOCode,
  ChapterMismatch,
  DuplicateQuestionId,
  EmptyGroundTruth,
  // prompting
  EmptyLOSubset,
  // llm gateway
  NetworkError,
  AuthError,
  CassetteMiss,
  MalformedResponse,
  // metrics
  UnresolvedCode,
  // runner
  ConfigInvalid,
  // annotation
  NotFound,
  RevisionConflict,
  InvalidCode,
  // shared
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace atomiclo
