#include "error.hpp"

namespace torkos {

const char* err_code_name(ErrCode code) {
  switch (code) {
    case ErrCode::Parse: return "Parse";
    case ErrCode::NonPrimitiveRay: return "NonPrimitiveRay";
    case ErrCode::NonSmoothCone: return "NonSmoothCone";
    case ErrCode::NotAFan: return "NotAFan";
    case ErrCode::RankMismatch: return "RankMismatch";
    case ErrCode::LengthMismatch: return "LengthMismatch";
    case ErrCode::NotAFacet: return "NotAFacet";
    case ErrCode::NoContainingCone: return "NoContainingCone";
    case ErrCode::ConeMismatch: return "ConeMismatch";
    case ErrCode::FlavorMismatch: return "FlavorMismatch";
    case ErrCode::InvalidMorphism: return "InvalidMorphism";
    case ErrCode::NotLocallyClosed: return "NotLocallyClosed";
    case ErrCode::ResolutionTooLong: return "ResolutionTooLong";
    case ErrCode::SignIncoherence: return "SignIncoherence";
    case ErrCode::FanNotComplete: return "FanNotComplete";
    case ErrCode::NotLocallyFree: return "NotLocallyFree";
    case ErrCode::NotCoherent: return "NotCoherent";
    case ErrCode::NotTcf: return "NotTcf";
    case ErrCode::NotAComplex: return "NotAComplex";
    case ErrCode::Unsupported: return "Unsupported";
    case ErrCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace torkos
