#ifndef HDWN_ERROR_HPP
#define HDWN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hdwn {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorCode {
  InvalidData,        // non-finite entries, bad shapes, parse failures
  InvalidInput,       // caller passed an argument outside its contract
  LagTooLarge,
  DegenerateVariance, // a column (or the trace estimate) has no spread
  NotPsd,
  ShapeMismatch,
  InvalidProbability,
  NonStationary,
  RankDeficient,
  WindowTooLong,
  InvalidGrouping,
  Config,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidData: return "invalid-data";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::LagTooLarge: return "lag-too-large";
    case ErrorCode::DegenerateVariance: return "degenerate-variance";
    case ErrorCode::NotPsd: return "not-psd";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::InvalidProbability: return "invalid-p";
    case ErrorCode::NonStationary: return "nonstationary-draw";
    case ErrorCode::RankDeficient: return "rank-deficient";
    case ErrorCode::WindowTooLong: return "window-too-long";
    case ErrorCode::InvalidGrouping: return "invalid-grouping";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hdwn

#endif  // HDWN_ERROR_HPP
