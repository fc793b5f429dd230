#pragma once

#include <array>
#include <string>

namespace sfwm {

/// Speed of light in vacuum [m/s].
inline constexpr double kSpeedOfLight = 299792458.0;

/// Three-term Sellmeier model, n^2 = 1 + sum_i b_i l^2 / (l^2 - c_i), l in um.
struct SellmeierModel {
  std::string name;
  std::array<double, 3> b{};  // dimensionless
  std::array<double, 3> c{};  // um^2
  double window_min_um = 0.25;
  double window_max_um = 2.0;

  /// Throws InvalidArgument if coefficients are non-positive, the window is
  /// empty, or n <= 1 anywhere on the window.
  void validate() const;
  bool in_window(double wavelength_um) const {
    return wavelength_um >= window_min_um && wavelength_um <= window_max_um;
  }
};

/// Malitson fused-silica coefficients.
SellmeierModel fused_silica();

enum class Axis { Fast, Slow };

/// Polarization-maintaining fiber. The slow (high-index) axis is offset from
/// the fast axis by a wavelength-independent delta_n.
struct BirefringentFiber {
  SellmeierModel base = fused_silica();
  double delta_n = 0.0;
  double length_m = 0.0;

  void validate() const;
  BirefringentFiber with_delta_n(double dn) const {
    BirefringentFiber f = *this;
    f.delta_n = dn;
    return f;
  }
};

double wavelength_um_from_omega(double omega);
double omega_from_wavelength_nm(double wavelength_nm);
double wavelength_nm_from_omega(double omega);

/// Base (fast-axis) index of the Sellmeier model alone.
double sellmeier_index(const SellmeierModel& model, double wavelength_um);
/// Closed-form dn/dlambda [1/um].
double sellmeier_index_derivative(const SellmeierModel& model, double wavelength_um);

double refractive_index(const BirefringentFiber& fiber, Axis axis, double wavelength_um);
/// k = n(omega) omega / c [rad/m].
double wavenumber(const BirefringentFiber& fiber, Axis axis, double omega);
/// n_g = n - lambda dn/dlambda.
double group_index(const BirefringentFiber& fiber, Axis axis, double wavelength_um);
double group_velocity(const BirefringentFiber& fiber, Axis axis, double wavelength_um);

enum class GvmRegime { PumpMatchesSignal, PumpBetween, PumpMatchesIdler, Outside };

struct GvmClassification {
  GvmRegime regime = GvmRegime::Outside;
  bool degenerate = false;  // pump matches both signal and idler
  double v_pump = 0.0;
  double v_signal = 0.0;
  double v_idler = 0.0;
};

/// Pump on the slow axis, signal and idler on the fast axis. Velocity equality
/// uses a relative tolerance of 1e-6.
GvmClassification gvm_classify(const BirefringentFiber& fiber, double pump_um, double signal_um,
                               double idler_um);

std::string to_string(GvmRegime regime);

}  // namespace sfwm
