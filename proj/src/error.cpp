#include "demod/error.hpp"

namespace demod {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::MalformedTopic: return "MalformedTopic";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::Overloaded: return "Overloaded";
    case ErrorCode::Refusal: return "Refusal";
    case ErrorCode::MalformedModelOutput: return "MalformedModelOutput";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::UnknownRole: return "UnknownRole";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PlatformError: return "PlatformError";
    case ErrorCode::DatasetParse: return "DatasetParse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_retriable(ErrorCode code) {
  return code == ErrorCode::Transport || code == ErrorCode::Overloaded;
}

bool is_provider_error(ErrorCode code) {
  return code == ErrorCode::Transport || code == ErrorCode::Overloaded ||
         code == ErrorCode::Refusal ||
         code == ErrorCode::MalformedModelOutput;
}

}  // namespace demod
