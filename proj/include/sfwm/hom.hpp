#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sfwm/jsa.hpp"

namespace sfwm {

/// O(tau) = Tr[rho_a Phi(tau) rho_b Phi(tau)^dagger], Phi = diag(exp(-i w_j tau)).
double hom_overlap(const HeraldedState& a, const HeraldedState& b, double tau_s);

/// Balanced splitter: P_c = (1 - O) / 2.
double coincidence_probability(const HeraldedState& a, const HeraldedState& b, double tau_s);

struct HomScan {
  std::vector<double> delays_s;
  std::vector<double> coincidence_probability;
  double visibility = 0.0;
};

/// Evaluates P_c on the delays and fills in the visibility.
HomScan hom_scan(const HeraldedState& a, const HeraldedState& b, std::vector<double> delays_s);

/// V = (P_inf - P_min) / P_inf, P_inf the mean of the outer 10% of samples.
double visibility(const HomScan& scan);

/// Symmetric delay grid [-half_range, half_range] with `points` samples.
std::vector<double> symmetric_delays(double half_range_s, std::size_t points);

/// FWHM of the dip depth (P_inf - P_c) in seconds, if resolvable.
std::optional<double> dip_fwhm(const HomScan& scan);

struct BackgroundEstimate {
  double background_counts = 0.0;
  double visibility_correction = 0.0;  // background / dip baseline
};

/// Accidental fourfolds from a threefold event of one source coinciding with
/// a herald of the other: (R3a Rsb + R3b Rsa) w T.
BackgroundEstimate multi_pair_background(double threefold_rate_a, double signal_rate_b,
                                         double threefold_rate_b, double signal_rate_a,
                                         double coincidence_window_s, double duration_s,
                                         double baseline_counts);

struct FourfoldScan {
  std::vector<double> delays_s;
  std::vector<double> coincidence_probability;
  std::vector<double> expected_counts;
  double background_counts = 0.0;
  std::optional<std::vector<std::int64_t>> sampled_counts;
};

/// expected = baseline * 2 P_c + background; Poisson samples when seeded.
FourfoldScan simulate_fourfold_scan(const HeraldedState& a, const HeraldedState& b,
                                    const std::vector<double>& delays_s, double baseline_counts,
                                    double background_counts, std::optional<std::uint64_t> seed);

/// CSV: delay_ps,probability,expected_counts,sampled_counts
void write_scan_csv(const FourfoldScan& scan, std::ostream& os);

}  // namespace sfwm
