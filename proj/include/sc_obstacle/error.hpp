#pragma once

#include <stdexcept>
#include <string>

namespace sc_obstacle {

enum class ErrorCode {
  InvalidInput,
  DimensionMismatch,
  NonPositiveRho,
  DegenerateGamma,
  InvalidMesh,
  ShapeViolation,
  UnboundedRatio,
  AlphaAtCriticalValue,
  BracketFailure,
  RootNotBracketed,
  BetaOutOfRange,
  NotConverged,
  InvalidBounds,
  InsufficientRange,
  CoincidentPoints,
  PackingFailure,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures derive from this; the CLI maps code() to exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NotConverged : public Error {
 public:
  NotConverged(long sweeps, double residual)
      : Error(ErrorCode::NotConverged,
              "no convergence after " + std::to_string(sweeps) + " sweeps (last max update " +
                  std::to_string(residual) + ")"),
        sweeps_(sweeps),
        residual_(residual) {}

  long sweeps() const noexcept { return sweeps_; }
  double residual() const noexcept { return residual_; }

 private:
  long sweeps_;
  double residual_;
};

}  // namespace sc_obstacle
