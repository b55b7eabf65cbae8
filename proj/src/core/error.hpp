#pragma once

#include <stdexcept>
#include <string>

namespace torkos {

// Error codes mirror the C API status values (torkos.h). Keep in sync.
enum class ErrCode {
  Parse = 1,
  NonPrimitiveRay,
  NonSmoothCone,
  NotAFan,
  RankMismatch,
  LengthMismatch,
  NotAFacet,
  NoContainingCone,
  ConeMismatch,
  FlavorMismatch,
  InvalidMorphism,
  NotLocallyClosed,
  ResolutionTooLong,
  SignIncoherence,
  FanNotComplete,
  NotLocallyFree,
  NotCoherent,
  NotTcf,
  NotAComplex,
  Unsupported,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrCode code() const { return code_; }

private:
  ErrCode code_;
};

[[noreturn]] inline void fail(ErrCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, ErrCode code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

const char* err_code_name(ErrCode code);

}  // namespace torkos
