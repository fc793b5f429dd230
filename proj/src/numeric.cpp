#include "sfwm/numeric.hpp"

#include <algorithm>
#include <iterator>

namespace sfwm {

std::optional<std::pair<double, double>> half_max_crossings(std::span<const double> x,
                                                             std::span<const double> y) {
  if (x.size() != y.size() || y.size() < 3) return std::nullopt;
  const auto peak_it = std::max_element(y.begin(), y.end());
  const auto peak = static_cast<std::size_t>(std::distance(y.begin(), peak_it));
  const double half = 0.5 * *peak_it;
  if (!(half > 0.0)) return std::nullopt;

  const auto cross = [&](std::size_t inside, std::size_t outside) {
    const double t = (y[inside] - half) / (y[inside] - y[outside]);
    return x[inside] + t * (x[outside] - x[inside]);
  };

  std::optional<double> left;
  for (std::size_t i = peak; i > 0; --i) {
    if (y[i - 1] <= half) {
      left = cross(i, i - 1);
      break;
    }
  }
  std::optional<double> right;
  for (std::size_t i = peak; i + 1 < y.size(); ++i) {
    if (y[i + 1] <= half) {
      right = cross(i, i + 1);
      break;
    }
  }
  if (!left || !right) return std::nullopt;
  return std::make_pair(*left, *right);
}

std::optional<double> fwhm(std::span<const double> x, std::span<const double> y) {
  const auto c = half_max_crossings(x, y);
  if (!c) return std::nullopt;
  return c->second - c->first;
}

}  // namespace sfwm
