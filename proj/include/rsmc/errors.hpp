#pragma once

#include <stdexcept>
#include <string>

namespace rsmc {

// Error categories surfaced by the library. Kept as a flat enum so callers
// (and the CLI exit-code mapping) can dispatch without string matching.
enum class Errc {
  NonSquare,
  NegativeRate,
  ZeroRate,
  ZeroExitRate,
  RowMismatch,
  ToleranceNotReached,
  OutOfHorizon,
  UnsupportedOrder,
  BadTimePoint,
  GammaTooLarge,
  ConfigParse,
  ModelInvalid,
  IoFailure,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonSquare: return "NonSquare";
    case Errc::NegativeRate: return "NegativeRate";
    case Errc::ZeroRate: return "ZeroRate";
    case Errc::ZeroExitRate: return "ZeroExitRate";
    case Errc::RowMismatch: return "RowMismatch";
    case Errc::ToleranceNotReached: return "ToleranceNotReached";
    case Errc::OutOfHorizon: return "OutOfHorizon";
    case Errc::UnsupportedOrder: return "UnsupportedOrder";
    case Errc::BadTimePoint: return "BadTimePoint";
    case Errc::GammaTooLarge: return "GammaTooLarge";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::ModelInvalid: return "ModelInvalid";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, Errc code, const std::string& message) {
  if (!ok) raise(code, message);
}

}  // namespace rsmc
