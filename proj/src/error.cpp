#include "hcrp/error.hpp"

namespace hcrp {

const char* errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RemoveFromEmpty: return "RemoveFromEmpty";
    case ErrorCode::ProposalOutsideRestriction: return "ProposalOutsideRestriction";
    case ErrorCode::ZeroLikelihoodBlock: return "ZeroLikelihoodBlock";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ZeroLikelihood: return "ZeroLikelihood";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::AuditFailure: return "AuditFailure";
  }
  return "Unknown";
}

}  // namespace hcrp
