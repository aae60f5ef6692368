#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbg {

enum class Errc {
  NonMonotone,
  NonPositive,
  LengthMismatch,
  Domain,
  StrictDecreaseRequired,
  MaxEffortViolation,
  NoBracket,
  NonConvergence,
  ValidationFailed,
  MonotonicityBroken,
  NonPositiveDelta,
  ProbabilityAboveOne,
  Infeasible,
  Degenerate,
  Config,
};

const char* errc_name(Errc code);

/// Exception carrying a machine-readable code and, where it applies, the
/// offending index (rank or creator, zero-based; -1 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::ptrdiff_t index = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        index_(index) {}

  Errc code() const noexcept { return code_; }
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  Errc code_;
  std::ptrdiff_t index_;
};

}  // namespace pbg
