#include "infodemic/error.h"

namespace infodemic {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyRecord: return "EmptyRecord";
    case ErrorCode::kInvalidRecord: return "InvalidRecord";
    case ErrorCode::kInsufficientCorpus: return "InsufficientCorpus";
    case ErrorCode::kNoProfiles: return "NoProfiles";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kUnknownQuestion: return "UnknownQuestion";
    case ErrorCode::kUnknownTask: return "UnknownTask";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kUnknownLanguage: return "UnknownLanguage";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMissingModel: return "MissingModel";
    case ErrorCode::kMissingData: return "MissingData";
    case ErrorCode::kInvalidDateRange: return "InvalidDateRange";
    case ErrorCode::kSourceUnreadable: return "SourceUnreadable";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace infodemic
