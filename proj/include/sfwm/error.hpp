#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfwm {

enum class ErrorKind {
  // configuration
  ConfigInvalid,
  // domain
  OutOfDispersionWindow,
  InvalidArgument,
  NoSolution,
  InconsistentTriple,
  NonPositiveBirefringence,
  GridTooCoarse,
  FilterOutsideGrid,
  GridMismatch,
  PlateauNotReached,
  ZeroDenominator,
  UnphysicalEfficiency,
  EmptyCurve,
  BoundaryMaximum,
  // numerical
  SvdFailure,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for an error kind: 1 config, 2 domain, 3 numerical.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sfwm
