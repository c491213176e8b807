// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pneusim {

/// Error categories; values double as CLI exit codes where documented.
enum class ErrorCode : int {
  Config = 1,
  Fit = 2,
  Solver = 3,
  Calibration = 4,
  LogIntegrity = 5,
  InvalidArgument = 6,
  Io = 7,
  Internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// Control-flow signal used inside the nonlinear solver: a trial state produced
// a non-positive Jacobian (element inversion) or a non-SPD stretch. Callers
// react with a step cutback; if it escapes the solver it becomes a Solver error.
struct InvalidDeformation {
  std::string where;
};

}  // namespace pneusim
