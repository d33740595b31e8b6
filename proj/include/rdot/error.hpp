#ifndef RDOT_ERROR_HPP
#define RDOT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rdot {

enum class ErrorCode {
  kNonSymmetric,
  kNoConvergence,
  kDimensionMismatch,
  kEmptyInput,
  kInvalidBeta,
  kInvalidParams,
  kBadMagic,
  kTruncatedFile,
  kUnsupportedVersion,
  kBadLength,
  kNoOverlap,
  kIoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rdot

#endif  // RDOT_ERROR_HPP
