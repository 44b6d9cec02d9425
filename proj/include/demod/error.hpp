#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace demod {

enum class ErrorCode {
  TooShort,
  MalformedTopic,
  EmptyInput,
  Transport,
  Overloaded,
  Refusal,
  MalformedModelOutput,
  Unauthorized,
  UnknownRole,
  UnknownUser,
  NotFound,
  StorageFailure,
  EmptyCorpus,
  EmptySpace,
  DimensionMismatch,
  PlatformError,
  DatasetParse,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Errors a caller may retry without changing the request.
bool is_retriable(ErrorCode code);

// Provider-originated failures (surface as 502 from the service).
bool is_provider_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  bool retriable() const noexcept { return is_retriable(code_); }

 private:
  ErrorCode code_;
};

}  // namespace demod
