#pragma once

#include <optional>
#include <vector>

#include "sfwm/hom.hpp"
#include "sfwm/jsa.hpp"

namespace sfwm {

struct TuningCurve {
  std::vector<PhaseMatchSolution> rows;
  std::vector<double> omitted_pump_nm;  // pumps without a solution
};

/// solve_central at `steps` pump wavelengths evenly spaced over [lo, hi].
TuningCurve pump_tuning_curve(const BirefringentFiber& fiber, double pump_lo_nm, double pump_hi_nm,
                              std::size_t steps);

/// d(lambda_i)/d(delta_n) [nm per unit delta_n] by central difference.
double birefringence_sensitivity(const BirefringentFiber& fiber, double lambda_p_nm,
                                 double step = 1e-7);

struct PressureScanRow {
  double delta_n_offset = 0.0;
  double idler_nm = 0.0;
  double visibility = 0.0;
};

struct PressureScanResult {
  std::vector<PressureScanRow> rows;
  double total_idler_shift_nm = 0.0;
};

/// Offsets perturb fiber A only. Both heralded states live on the grid of the
/// unmodified fiber B; the visibility is the overlap at zero delay.
PressureScanResult pressure_scan(const BirefringentFiber& fiber_a, const BirefringentFiber& fiber_b,
                                 const std::vector<double>& delta_n_offsets,
                                 const PumpEnvelope& pump,
                                 const std::optional<SpectralFilter>& herald_filter,
                                 const GridSpec& grid = {});

/// Unfiltered Schmidt purity for a pump bandwidth, on the default grid.
double purity_for_bandwidth(const BirefringentFiber& fiber, PumpEnvelope pump, double fwhm_nm,
                            const GridSpec& grid = {});

struct BandwidthOptimum {
  double optimal_fwhm_nm = 0.0;
  double purity = 0.0;
  double purity_at_lower = 0.0;
  double purity_at_upper = 0.0;
  std::vector<std::pair<double, double>> bracket_history;  // (a, b) per iteration
  std::size_t evaluations = 0;
};

/// Golden-section maximization of unfiltered purity over the pump FWHM.
/// Throws BoundaryMaximum when the best point sits on a bound.
BandwidthOptimum optimize_pump_bandwidth(const BirefringentFiber& fiber, const PumpEnvelope& pump,
                                         double lower_nm, double upper_nm, double tolerance_nm = 0.005,
                                         const GridSpec& grid = {});

struct FilterTradeoffRow {
  double width_nm = 0.0;
  double purity = 0.0;
  double herald_probability = 0.0;
};

/// Herald filter of each width (other filter fields from `shape`) applied to
/// the signal arm of `jsa`.
std::vector<FilterTradeoffRow> filter_tradeoff_curve(const JointSpectralAmplitude& jsa,
                                                     const SpectralFilter& shape,
                                                     const std::vector<double>& widths_nm);

}  // namespace sfwm
