#include "atomiclo/error.hpp"

namespace atomiclo {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidCodeFormat: return "InvalidCodeFormat";
    case ErrorCode::DuplicateCode: return "DuplicateCode";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::InconsistentName: return "InconsistentName";
    case ErrorCode::UnknownChapter: return "UnknownChapter";
    case ErrorCode::UnknownLOCode: return "UnknownLOCode";
    case ErrorCode::ChapterMismatch: return "ChapterMismatch";
    case ErrorCode::DuplicateQuestionId: return "DuplicateQuestionId";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::EmptyLOSubset: return "EmptyLOSubset";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::CassetteMiss: return "CassetteMiss";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::UnresolvedCode: return "UnresolvedCode";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::RevisionConflict: return "RevisionConflict";
    case ErrorCode::InvalidCode: return "InvalidCode";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace atomiclo
