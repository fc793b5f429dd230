#pragma once

#include <cstdint>

namespace sfwm {

struct DetectionChain {
  double path_efficiency_signal = 1.0;
  double path_efficiency_idler = 1.0;
  double detector_efficiency = 1.0;

  void validate() const;
  double signal_total() const { return path_efficiency_signal * detector_efficiency; }
  double idler_total() const { return path_efficiency_idler * detector_efficiency; }
};

/// Rates in Hz. R_c counts signal-idler coincidences; threefold is the
/// herald plus both idler detectors behind the 50/50 split.
struct CountRates {
  double signal = 0.0;
  double idler = 0.0;
  double coincidence = 0.0;
  double threefold = 0.0;
  double duration_s = 0.0;

  void validate() const;
};

enum class PairStatistics { Poissonian, ThermalSingleMode };

struct SourceRateModel {
  double mean_pairs_per_pulse = 0.0;  // mu
  double repetition_rate_hz = 76e6;
  PairStatistics statistics = PairStatistics::Poissonian;

  void validate() const;
};

/// eta_h = R_c / (R_s eta_d); values above 1.05 are rejected.
double heralding_efficiency(const CountRates& rates, double detector_efficiency);
/// R_c / R_s
double overall_detection_efficiency(const CountRates& rates);
/// P_h = eta_h R_s / f_rep
double herald_probability_per_pulse(double heralding_eff, double signal_rate_hz,
                                    double repetition_rate_hz);
/// g2 = N_hi1i2 N_h / (N_hi1 N_hi2)
double heralded_g2(double n_herald, double n_herald_idler1, double n_herald_idler2,
                   double n_herald_idler1_idler2);

/// Raw click counters from the pulse-gated Monte Carlo.
struct ClickCounts {
  std::uint64_t pulses = 0;
  std::uint64_t herald = 0;        // signal clicks
  std::uint64_t idler = 0;         // idler1 or idler2
  std::uint64_t idler1 = 0;
  std::uint64_t idler2 = 0;
  std::uint64_t coincidence = 0;   // herald and (idler1 or idler2)
  std::uint64_t herald_idler1 = 0;
  std::uint64_t herald_idler2 = 0;
  std::uint64_t threefold = 0;     // herald and idler1 and idler2

  ClickCounts& operator+=(const ClickCounts& o);
};

struct ExpectedRates {
  double signal = 0.0;
  double idler = 0.0;
  double coincidence = 0.0;
};

struct ForwardCountResult {
  ClickCounts counts;
  CountRates rates;
  ExpectedRates first_order;  // leading order in mu
  ExpectedRates exact;        // closed form for binary detectors
  double heralded_g2 = 0.0;
};

/// Pulse-by-pulse Monte Carlo of pair emission, loss, a 50/50 idler split and
/// binary detection. Pulses are processed in fixed blocks, each with a seed
/// derived from `seed` and the block index, so results do not depend on how
/// blocks are scheduled.
ForwardCountResult forward_count_model(const SourceRateModel& model, const DetectionChain& chain,
                                       double duration_s, std::uint64_t seed);

struct InvertedSource {
  SourceRateModel model;
  DetectionChain chain;
};

/// First-order inversion of (R_s, R_i, R_c): mu = R_s R_i / (R_c f_rep),
/// total arm efficiencies R_c/R_i and R_c/R_s.
InvertedSource invert_rates(const CountRates& rates, double detector_efficiency,
                            double repetition_rate_hz);

/// splitmix64 finalizer, used for all seed derivations.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sfwm
