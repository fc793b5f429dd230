#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfwm/counts.hpp"
#include "sfwm/jsa.hpp"
#include "sfwm/phasematch.hpp"

namespace sfwm {

inline constexpr int kConfigSchemaVersion = 1;

struct CalibrationTriple {
  double pump_nm = 0.0;
  double signal_nm = 0.0;
  double idler_nm = 0.0;
};

struct RatesConfig {
  CountRates measured;
  double detector_efficiency = 0.0;
  double repetition_rate_hz = 0.0;
  std::optional<double> monte_carlo_duration_s;
  PairStatistics statistics = PairStatistics::Poissonian;
};

struct BackgroundConfig {
  double threefold_rate_a_hz = 0.0;
  double signal_rate_b_hz = 0.0;
  double threefold_rate_b_hz = 0.0;
  double signal_rate_a_hz = 0.0;
  double window_s = 0.0;
  double duration_s = 0.0;
};

struct HomConfig {
  double half_range_ps = 20.0;
  std::size_t points = 201;
  double baseline_counts = 300.0;
  std::optional<BackgroundConfig> background;
  double delta_n_offset_b = 0.0;  // detunes source B
};

struct TuneConfig {
  double pump_lo_nm = 705.0;
  double pump_hi_nm = 725.0;
  std::size_t steps = 21;
  double idler_shift_nm = 0.20;  // total idler shift spanned by the pressure scan
  std::size_t scan_points = 5;
};

struct OptimizeConfig {
  double lower_nm = 0.1;
  double upper_nm = 1.0;
  double tolerance_nm = 0.005;
  std::vector<double> filter_widths_nm = {5.0, 3.0, 2.0, 1.5, 1.0, 0.75, 0.5, 0.3, 0.2, 0.1};
};

/// Parsed and validated run configuration. Fiber delta_n is resolved at load
/// time: either given directly or calibrated from `calibration`.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  BirefringentFiber fiber;
  std::optional<CalibrationTriple> calibration;
  PumpEnvelope pump;
  EnvelopeMode envelope_mode = EnvelopeMode::SelfConvolution;
  GridSpec grid;
  std::optional<SpectralFilter> herald_filter;
  std::optional<RatesConfig> rates;
  HomConfig hom;
  TuneConfig tune;
  OptimizeConfig optimize;
};

/// Throws Error(ConfigInvalid) naming the offending key path for missing,
/// mistyped or unknown keys; module errors from calibration propagate.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace sfwm
