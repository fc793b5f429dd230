#include "sfwm/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sfwm/error.hpp"

namespace sfwm {

namespace {

// arccosh(sqrt(2)): half width at half maximum of sech^2 in units of its width.
const double kSechHalfWidth = std::acosh(std::numbers::sqrt2);

double sech_width_hz(double fwhm_hz) { return fwhm_hz / (2.0 * kSechHalfWidth); }

double real_pump_amplitude(const PumpEnvelope& pump, double fwhm_hz, double nu_hz) {
  switch (pump.shape) {
    case PumpShape::SechSquaredIntensity:
      return 1.0 / std::cosh(nu_hz / sech_width_hz(fwhm_hz));
    case PumpShape::GaussianIntensity: {
      const double x = nu_hz / fwhm_hz;
      return std::exp(-2.0 * std::numbers::ln2 * x * x);
    }
  }
  return 0.0;
}

}  // namespace

void PumpEnvelope::validate() const {
  if (!(fwhm_nm > 0.0)) throw Error(ErrorKind::InvalidArgument, "pump FWHM must be positive");
  if (!(center_nm > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "pump center wavelength must be positive");
  }
}

double PumpEnvelope::fwhm_hz() const {
  const double l = center_nm * 1e-9;
  return kSpeedOfLight * fwhm_nm * 1e-9 / (l * l);
}

double delta_k(const BirefringentFiber& fiber, double omega_s, double omega_i) {
  const double omega_p = 0.5 * (omega_s + omega_i);
  return 2.0 * wavenumber(fiber, Axis::Slow, omega_p) - wavenumber(fiber, Axis::Fast, omega_s) -
         wavenumber(fiber, Axis::Fast, omega_i);
}

PhaseMatchSolution solve_central(const BirefringentFiber& fiber, double lambda_p_nm) {
  const SellmeierModel& model = fiber.base;
  if (!model.in_window(lambda_p_nm * 1e-3)) {
    throw Error(ErrorKind::OutOfDispersionWindow, "pump wavelength outside dispersion window");
  }
  if (!(fiber.delta_n > 0.0)) {
    throw Error(ErrorKind::NoSolution, "no non-trivial phase matching without birefringence");
  }

  const double omega_p = omega_from_wavelength_nm(lambda_p_nm);
  const double omega_hi = omega_from_wavelength_nm(model.window_min_um * 1e3);
  const double omega_lo = omega_from_wavelength_nm(model.window_max_um * 1e3);
  const double delta_max = std::min(omega_hi - omega_p, omega_p - omega_lo) * (1.0 - 1e-12);

  const auto mismatch = [&](double d) { return delta_k(fiber, omega_p + d, omega_p - d); };

  constexpr int kScanSteps = 2000;
  const double step = delta_max / kScanSteps;
  double lo = 0.0;
  double hi = 0.0;
  double f_prev = mismatch(step);
  bool bracketed = false;
  for (int i = 2; i <= kScanSteps; ++i) {
    const double d = step * i;
    const double f = mismatch(d);
    if (f_prev > 0.0 && f <= 0.0) {
      lo = d - step;
      hi = d;
      bracketed = true;
      break;
    }
    f_prev = f;
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "no sign change of delta_k for detuning in (0, " << delta_max << "] rad/s at pump "
       << lambda_p_nm << " nm";
    throw Error(ErrorKind::NoSolution, os.str());
  }

  // f(lo) > 0 >= f(hi)
  double mid = 0.5 * (lo + hi);
  double f_mid = mismatch(mid);
  for (int iter = 0; iter < 200 && std::abs(f_mid) >= 1e-6; ++iter) {
    if (f_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    const double next = 0.5 * (lo + hi);
    if (next == lo || next == hi) break;
    mid = next;
    f_mid = mismatch(mid);
  }

  PhaseMatchSolution sol;
  sol.lambda_p_nm = lambda_p_nm;
  sol.lambda_s_nm = wavelength_nm_from_omega(omega_p + mid);
  sol.lambda_i_nm = wavelength_nm_from_omega(omega_p - mid);
  sol.residual_delta_k = f_mid;
  return sol;
}

double conserve_signal_nm(double lambda_p_nm, double lambda_i_nm) {
  return 1.0 / (2.0 / lambda_p_nm - 1.0 / lambda_i_nm);
}

double calibrate_delta_n(const SellmeierModel& model, double lambda_p_nm, double lambda_s_nm,
                         double lambda_i_nm) {
  const double projected_s = conserve_signal_nm(lambda_p_nm, lambda_i_nm);
  const double shift = std::abs(projected_s - lambda_s_nm);
  if (!(shift <= 1.0)) {
    std::ostringstream os;
    os << "energy conservation 2/lp = 1/ls + 1/li violated: signal would move by " << shift
       << " nm (limit 1 nm)";
    throw Error(ErrorKind::InconsistentTriple, os.str());
  }

  BirefringentFiber isotropic;
  isotropic.base = model;
  isotropic.delta_n = 0.0;
  const double omega_p = omega_from_wavelength_nm(lambda_p_nm);
  const double omega_s = omega_from_wavelength_nm(projected_s);
  const double omega_i = omega_from_wavelength_nm(lambda_i_nm);

  const double n_p = refractive_index(isotropic, Axis::Fast, lambda_p_nm * 1e-3);
  const double k_sum =
      wavenumber(isotropic, Axis::Fast, omega_s) + wavenumber(isotropic, Axis::Fast, omega_i);
  const double dn = (k_sum - 2.0 * n_p * omega_p / kSpeedOfLight) * kSpeedOfLight / (2.0 * omega_p);
  if (!(dn > 0.0)) {
    std::ostringstream os;
    os << "calibration gives delta_n = " << dn;
    throw Error(ErrorKind::NonPositiveBirefringence, os.str());
  }
  return dn;
}

std::complex<double> pump_amplitude(const PumpEnvelope& pump, double nu_hz) {
  return {real_pump_amplitude(pump, pump.fwhm_hz(), nu_hz), 0.0};
}

TwoPhotonEnvelope::TwoPhotonEnvelope(const PumpEnvelope& pump, EnvelopeMode mode)
    : pump_(pump), mode_(mode) {
  pump_.validate();
  if (mode_ == EnvelopeMode::Substitution) return;

  const double fwhm = pump_.fwhm_hz();
  // Characteristic amplitude width; tails beyond 40 widths are below 1e-17.
  const double width = pump_.shape == PumpShape::SechSquaredIntensity
                           ? sech_width_hz(fwhm)
                           : fwhm / (2.0 * std::sqrt(std::numbers::ln2));
  const double half_span_widths = pump_.shape == PumpShape::SechSquaredIntensity ? 40.0 : 12.0;
  constexpr int kPerWidth = 100;
  const int half = static_cast<int>(half_span_widths * kPerWidth);
  step_hz_ = width / kPerWidth;
  half_span_hz_ = half * step_hz_;

  // Single-pump samples on [-2H, 2H] so that a[k - j] stays on the lattice.
  std::vector<double> a(4 * half + 1);
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    a[i] = real_pump_amplitude(pump_, fwhm, (i - 2 * half) * step_hz_);
  }
  const auto at = [&](int idx) { return a[idx + 2 * half]; };

  auto table = std::make_shared<std::vector<double>>(half + 1);
  for (int k = 0; k <= half; ++k) {
    double acc = 0.0;
    for (int j = -half; j <= half; ++j) acc += at(j) * at(k - j);
    (*table)[k] = acc;
  }
  const double peak = (*table)[0];
  for (double& v : *table) v /= peak;
  table_ = std::move(table);
}

std::complex<double> TwoPhotonEnvelope::operator()(double nu_sum_hz) const {
  if (mode_ == EnvelopeMode::Substitution) return pump_amplitude(pump_, nu_sum_hz);
  const double x = std::abs(nu_sum_hz) / step_hz_;
  const auto& t = *table_;
  if (x >= static_cast<double>(t.size() - 1)) return {0.0, 0.0};
  const auto i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  return {t[i] + frac * (t[i + 1] - t[i]), 0.0};
}

double TwoPhotonEnvelope::fwhm_hz() const {
  if (mode_ == EnvelopeMode::Substitution) return pump_.fwhm_hz();
  const auto& t = *table_;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double y0 = t[i - 1] * t[i - 1];
    const double y1 = t[i] * t[i];
    if (y1 <= 0.5 && y0 > 0.5) {
      const double frac = (y0 - 0.5) / (y0 - y1);
      return 2.0 * (static_cast<double>(i - 1) + frac) * step_hz_;
    }
  }
  return 2.0 * half_span_hz_;
}

std::complex<double> two_photon_envelope(const PumpEnvelope& pump, double nu_sum_hz,
                                         EnvelopeMode mode) {
  return TwoPhotonEnvelope(pump, mode)(nu_sum_hz);
}

std::complex<double> phase_matching_from_mismatch(double delta_k, double length_m) {
  const double x = 0.5 * delta_k * length_m;
  const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
  return std::polar(1.0, x) * sinc;
}

std::complex<double> phase_matching_function(const BirefringentFiber& fiber, double omega_s,
                                             double omega_i) {
  return phase_matching_from_mismatch(delta_k(fiber, omega_s, omega_i), fiber.length_m);
}

}  // namespace sfwm
