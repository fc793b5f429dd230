#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sfwm/dispersion.hpp"
#include "sfwm/phasematch.hpp"

namespace sfwm {

/// Uniform midpoint grids in angular frequency [rad/s]; rows index the
/// signal axis, columns the idler axis.
struct SpectralGrid {
  std::vector<double> signal_axis;
  std::vector<double> idler_axis;

  static SpectralGrid centered(double signal_center, double signal_half_span, std::size_t n,
                               double idler_center, double idler_half_span, std::size_t m);

  std::size_t rows() const { return signal_axis.size(); }
  std::size_t cols() const { return idler_axis.size(); }
  double d_signal() const;
  double d_idler() const;
  /// Throws InvalidArgument unless both axes have >= 64 strictly increasing,
  /// uniformly spaced samples.
  void validate() const;
};

struct GridSpec {
  std::size_t points = 512;   // per axis
  double span_factor = 4.0;   // half span in units of the unfiltered marginal FWHM
};

/// Grid centered on the central phase-matching solution, each axis spanning
/// +-span_factor marginal FWHM. The marginal widths come from a coarse
/// preliminary build.
SpectralGrid default_grid(const BirefringentFiber& fiber, const TwoPhotonEnvelope& envelope,
                          const GridSpec& spec = {});

struct JointSpectralAmplitude {
  SpectralGrid grid;
  Eigen::MatrixXcd amplitude;  // rows: signal, cols: idler
  double norm_weight = 1.0;

  /// sum |f|^2 dws dwi
  double norm_squared() const;
};

enum class Arm { Signal, Idler };

enum class FilterShape { Rectangular, SuperGaussian };

struct SpectralFilter {
  double center_nm = 0.0;
  double fwhm_nm = 0.0;
  FilterShape shape = FilterShape::SuperGaussian;
  int order = 4;  // super-Gaussian order; exp(-ln2 (2 dl / fwhm)^(2 order))
  double peak_transmission = 1.0;

  void validate() const;
  /// Intensity transmission at a vacuum wavelength.
  double transmission(double wavelength_nm) const;
};

struct SchmidtDecomposition {
  std::vector<double> probabilities;  // descending, sum 1
  double purity = 0.0;
  double schmidt_number = 0.0;
};

/// Idler-basis density matrix, rho_jk = sum_s f(s, j) f*(s, k), unit trace.
struct HeraldedState {
  std::vector<double> idler_axis;
  Eigen::MatrixXcd rho;
  double herald_probability = 1.0;

  double purity() const;
  /// Pure state from sampled amplitudes on an axis; normalized internally.
  static HeraldedState from_pure(std::vector<double> axis, const Eigen::VectorXcd& amplitudes);
};

struct MarginalSpectrum {
  std::vector<double> omega;          // rad/s, ascending
  std::vector<double> wavelength_nm;  // same order as omega
  std::vector<double> intensity;      // per unit angular frequency
  std::optional<double> fwhm_omega;
  std::optional<double> fwhm_nm;
};

/// f = envelope((ws + wi - 2 wp0) / 2pi) * phase_matching(ws, wi), unit L2 norm.
JointSpectralAmplitude build_jsa(const BirefringentFiber& fiber, const TwoPhotonEnvelope& envelope,
                                 const SpectralGrid& grid);

SchmidtDecomposition schmidt(const JointSpectralAmplitude& jsa);

/// Multiplies rows (Signal) or columns (Idler) by sqrt(T); scales norm_weight
/// by the retained fraction. Never renormalizes.
JointSpectralAmplitude apply_filter(const JointSpectralAmplitude& jsa, Arm arm,
                                    const SpectralFilter& filter);

HeraldedState heralded_density_matrix(const JointSpectralAmplitude& jsa,
                                      const std::optional<SpectralFilter>& herald_filter = {});

MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa, Arm arm);

/// CSV rows: omega_s,omega_i,re,im (rad/s).
void write_jsa_csv(const JointSpectralAmplitude& jsa, std::ostream& os);

/// Little-endian dump: magic "SFWMJSA1", u64 rows, u64 cols, f64 norm_weight,
/// rows f64 signal axis, cols f64 idler axis, rows*cols (re, im) f64 pairs in
/// row-major order.
void write_jsa_binary(const JointSpectralAmplitude& jsa, std::ostream& os);
JointSpectralAmplitude read_jsa_binary(std::istream& is);

}  // namespace sfwm
