#pragma once

#include <optional>
#include <span>
#include <utility>

namespace sfwm {

/// Linearly interpolated half-maximum crossings of a single-peaked sampled
/// curve, walking outwards from the maximum. Empty if either side never
/// drops below half maximum.
std::optional<std::pair<double, double>> half_max_crossings(std::span<const double> x,
                                                             std::span<const double> y);

/// Width between the half-maximum crossings, or nullopt.
std::optional<double> fwhm(std::span<const double> x, std::span<const double> y);

}  // namespace sfwm
