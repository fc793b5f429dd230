#include "sfwm/error.hpp"

namespace sfwm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::OutOfDispersionWindow: return "OutOfDispersionWindow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::InconsistentTriple: return "InconsistentTriple";
    case ErrorKind::NonPositiveBirefringence: return "NonPositiveBirefringence";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::FilterOutsideGrid: return "FilterOutsideGrid";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::PlateauNotReached: return "PlateauNotReached";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::UnphysicalEfficiency: return "UnphysicalEfficiency";
    case ErrorKind::EmptyCurve: return "EmptyCurve";
    case ErrorKind::BoundaryMaximum: return "BoundaryMaximum";
    case ErrorKind::SvdFailure: return "SvdFailure";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return 1;
    case ErrorKind::SvdFailure: return 3;
    default: return 2;
  }
}

}  // namespace sfwm
