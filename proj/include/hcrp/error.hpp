#pragma once

#include <stdexcept>
#include <string>

namespace hcrp {

enum class ErrorCode {
  InvalidArgument = 1,
  RemoveFromEmpty,
  ProposalOutsideRestriction,
  ZeroLikelihoodBlock,
  LengthMismatch,
  ZeroVariance,
  ZeroLikelihood,
  EmptyCorpus,
  AllZeroWeights,
  Parse,
  Io,
  AuditFailure,
};

const char* errorCodeName(ErrorCode code);

// All library failures are reported through this type; the C API maps the
// code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hcrp
