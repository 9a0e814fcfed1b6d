#pragma once

#include <stdexcept>
#include <string>

namespace matchlift {

enum class ErrorCode {
  kShapeMismatch,
  kAsymmetricInput,
  kInvalidParams,
  kNoConvergence,
  kEmptyGraph,
  kDegenerateSpectrum,
  kNumericalBreakdown,
  kInvalidR,
  kParse,
  kIo,
  kTimeout,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI, the sweep harness) can dispatch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace matchlift
