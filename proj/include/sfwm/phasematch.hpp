#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "sfwm/dispersion.hpp"

namespace sfwm {

enum class PumpShape { SechSquaredIntensity, GaussianIntensity };

struct PumpEnvelope {
  double center_nm = 715.0;
  double fwhm_nm = 0.33;  // intensity FWHM
  PumpShape shape = PumpShape::SechSquaredIntensity;

  void validate() const;
  double center_omega() const { return omega_from_wavelength_nm(center_nm); }
  /// Intensity FWHM in Hz, converted at the center wavelength (c dl / l^2).
  double fwhm_hz() const;
};

/// Central signal/idler solution for a given pump. Signal is the blue photon.
struct PhaseMatchSolution {
  double lambda_p_nm = 0.0;
  double lambda_s_nm = 0.0;
  double lambda_i_nm = 0.0;
  double residual_delta_k = 0.0;  // rad/m

  double omega_p() const { return omega_from_wavelength_nm(lambda_p_nm); }
  double omega_s() const { return omega_from_wavelength_nm(lambda_s_nm); }
  double omega_i() const { return omega_from_wavelength_nm(lambda_i_nm); }
};

/// dk = 2 k_slow(w_p) - k_fast(w_s) - k_fast(w_i), w_p = (w_s + w_i) / 2.
double delta_k(const BirefringentFiber& fiber, double omega_s, double omega_i);

/// Solves dk = 0 with w_s = w_p + d, w_i = w_p - d for the first root d > 0.
PhaseMatchSolution solve_central(const BirefringentFiber& fiber, double lambda_p_nm);

/// Projects the triple onto energy conservation (idler fixed), then returns
/// the delta_n that zeroes dk there.
double calibrate_delta_n(const SellmeierModel& model, double lambda_p_nm, double lambda_s_nm,
                         double lambda_i_nm);

/// Signal wavelength satisfying 2/l_p = 1/l_s + 1/l_i for fixed pump and idler.
double conserve_signal_nm(double lambda_p_nm, double lambda_i_nm);

/// Real, transform-limited single-pump amplitude with peak 1; `nu_hz` is the
/// offset from the pump center.
std::complex<double> pump_amplitude(const PumpEnvelope& pump, double nu_hz);

enum class EnvelopeMode { SelfConvolution, Substitution };

/// Two-pump-photon envelope as a function of the summed frequency offset.
/// In SelfConvolution mode the product a*a is tabulated once on construction
/// and linearly interpolated; the table is immutable afterwards.
class TwoPhotonEnvelope {
 public:
  explicit TwoPhotonEnvelope(const PumpEnvelope& pump,
                             EnvelopeMode mode = EnvelopeMode::SelfConvolution);

  std::complex<double> operator()(double nu_sum_hz) const;

  EnvelopeMode mode() const { return mode_; }
  const PumpEnvelope& pump() const { return pump_; }
  /// Intensity FWHM of the envelope [Hz], read off the table (or the pump).
  double fwhm_hz() const;

 private:
  PumpEnvelope pump_;
  EnvelopeMode mode_;
  double step_hz_ = 0.0;
  double half_span_hz_ = 0.0;
  std::shared_ptr<const std::vector<double>> table_;
};

/// Convenience wrapper; builds a fresh envelope on every call.
std::complex<double> two_photon_envelope(const PumpEnvelope& pump, double nu_sum_hz,
                                         EnvelopeMode mode = EnvelopeMode::SelfConvolution);

/// sinc(dk L / 2) exp(i dk L / 2).
std::complex<double> phase_matching_from_mismatch(double delta_k, double length_m);
std::complex<double> phase_matching_function(const BirefringentFiber& fiber, double omega_s,
                                             double omega_i);

}  // namespace sfwm
