#include "sfwm/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sfwm/error.hpp"

namespace sfwm {

SellmeierModel fused_silica() {
  SellmeierModel m;
  m.name = "fused_silica";
  m.b = {0.6961663, 0.4079426, 0.8974794};
  m.c = {0.0684043 * 0.0684043, 0.1162414 * 0.1162414, 9.896161 * 9.896161};
  return m;
}

void SellmeierModel::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(b[i] > 0.0) || !(c[i] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "Sellmeier coefficients must be positive");
    }
  }
  if (!(window_min_um > 0.0) || !(window_max_um > window_min_um)) {
    throw Error(ErrorKind::InvalidArgument, "Sellmeier validity window is empty");
  }
  // A pole inside the window would make n undefined there.
  for (double ci : c) {
    const double pole = std::sqrt(ci);
    if (pole >= window_min_um && pole <= window_max_um) {
      throw Error(ErrorKind::InvalidArgument, "Sellmeier pole inside the validity window");
    }
  }
  constexpr int kSamples = 200;
  for (int i = 0; i <= kSamples; ++i) {
    const double l = window_min_um + (window_max_um - window_min_um) * i / kSamples;
    const double n = sellmeier_index(*this, l);
    if (!(n > 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "Sellmeier index not > 1 on the validity window");
    }
  }
}

void BirefringentFiber::validate() const {
  base.validate();
  if (!(delta_n > 0.0 && delta_n < 1e-2)) {
    throw Error(ErrorKind::InvalidArgument, "delta_n must lie in (0, 1e-2)");
  }
  if (!(length_m > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "fiber length must be positive");
  }
}

double wavelength_um_from_omega(double omega) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / omega * 1e6;
}

double omega_from_wavelength_nm(double wavelength_nm) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / (wavelength_nm * 1e-9);
}

double wavelength_nm_from_omega(double omega) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / omega * 1e9;
}

namespace {

void check_window(const SellmeierModel& model, double wavelength_um) {
  if (!model.in_window(wavelength_um)) {
    std::ostringstream os;
    os << "wavelength " << wavelength_um << " um outside [" << model.window_min_um << ", "
       << model.window_max_um << "] um";
    throw Error(ErrorKind::OutOfDispersionWindow, os.str());
  }
}

double n_squared(const SellmeierModel& model, double l2) {
  double n2 = 1.0;
  for (int i = 0; i < 3; ++i) n2 += model.b[i] * l2 / (l2 - model.c[i]);
  return n2;
}

double axis_offset(const BirefringentFiber& fiber, Axis axis) {
  return axis == Axis::Slow ? fiber.delta_n : 0.0;
}

}  // namespace

double sellmeier_index(const SellmeierModel& model, double wavelength_um) {
  return std::sqrt(n_squared(model, wavelength_um * wavelength_um));
}

double sellmeier_index_derivative(const SellmeierModel& model, double wavelength_um) {
  // d(n^2)/dl = sum -2 b c l / (l^2 - c)^2
  const double l = wavelength_um;
  const double l2 = l * l;
  double dn2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = l2 - model.c[i];
    dn2 += -2.0 * model.b[i] * model.c[i] * l / (d * d);
  }
  return dn2 / (2.0 * std::sqrt(n_squared(model, l2)));
}

double refractive_index(const BirefringentFiber& fiber, Axis axis, double wavelength_um) {
  check_window(fiber.base, wavelength_um);
  return sellmeier_index(fiber.base, wavelength_um) + axis_offset(fiber, axis);
}

double wavenumber(const BirefringentFiber& fiber, Axis axis, double omega) {
  return refractive_index(fiber, axis, wavelength_um_from_omega(omega)) * omega / kSpeedOfLight;
}

double group_index(const BirefringentFiber& fiber, Axis axis, double wavelength_um) {
  const double n = refractive_index(fiber, axis, wavelength_um);
  return n - wavelength_um * sellmeier_index_derivative(fiber.base, wavelength_um);
}

double group_velocity(const BirefringentFiber& fiber, Axis axis, double wavelength_um) {
  return kSpeedOfLight / group_index(fiber, axis, wavelength_um);
}

GvmClassification gvm_classify(const BirefringentFiber& fiber, double pump_um, double signal_um,
                               double idler_um) {
  constexpr double kRelTol = 1e-6;
  GvmClassification out;
  out.v_pump = group_velocity(fiber, Axis::Slow, pump_um);
  out.v_signal = group_velocity(fiber, Axis::Fast, signal_um);
  out.v_idler = group_velocity(fiber, Axis::Fast, idler_um);

  const auto matches = [&](double v) { return std::abs(out.v_pump - v) <= kRelTol * out.v_pump; };
  const bool ms = matches(out.v_signal);
  const bool mi = matches(out.v_idler);
  if (ms && mi) {
    out.regime = GvmRegime::Outside;
    out.degenerate = true;
  } else if (ms) {
    out.regime = GvmRegime::PumpMatchesSignal;
  } else if (mi) {
    out.regime = GvmRegime::PumpMatchesIdler;
  } else if (std::min(out.v_signal, out.v_idler) < out.v_pump &&
             out.v_pump < std::max(out.v_signal, out.v_idler)) {
    out.regime = GvmRegime::PumpBetween;
  } else {
    out.regime = GvmRegime::Outside;
  }
  return out;
}

std::string to_string(GvmRegime regime) {
  switch (regime) {
    case GvmRegime::PumpMatchesSignal: return "PumpMatchesSignal";
    case GvmRegime::PumpBetween: return "PumpBetween";
    case GvmRegime::PumpMatchesIdler: return "PumpMatchesIdler";
    case GvmRegime::Outside: return "Outside";
  }
  return "Outside";
}

}  // namespace sfwm
