#include "sfwm/hom.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "sfwm/error.hpp"
#include "sfwm/numeric.hpp"

namespace sfwm {

namespace {

void require_same_axis(const HeraldedState& a, const HeraldedState& b) {
  if (a.idler_axis.size() != b.idler_axis.size()) {
    throw Error(ErrorKind::GridMismatch, "heralded states have different axis lengths");
  }
  for (std::size_t k = 0; k < a.idler_axis.size(); ++k) {
    const double tol = 1e-12 * std::abs(a.idler_axis[k]);
    if (std::abs(a.idler_axis[k] - b.idler_axis[k]) > tol) {
      throw Error(ErrorKind::GridMismatch, "heralded states use different frequency axes");
    }
  }
}

}  // namespace

double hom_overlap(const HeraldedState& a, const HeraldedState& b, double tau_s) {
  require_same_axis(a, b);
  const auto m = static_cast<Eigen::Index>(a.idler_axis.size());
  // Only frequency differences enter, so phases are taken relative to the
  // first sample to keep the arguments small.
  Eigen::VectorXcd phase(m);
  const double w0 = a.idler_axis.front();
  for (Eigen::Index j = 0; j < m; ++j) {
    phase(j) = std::polar(1.0, -(a.idler_axis[static_cast<std::size_t>(j)] - w0) * tau_s);
  }
  // Tr[A P B P^+] = sum_jk A_jk P_k B_kj conj(P_j)
  const Eigen::MatrixXcd shifted = phase.asDiagonal() * b.rho * phase.conjugate().asDiagonal();
  const double o = (a.rho.transpose().cwiseProduct(shifted)).sum().real();
  return std::clamp(o, 0.0, 1.0);
}

double coincidence_probability(const HeraldedState& a, const HeraldedState& b, double tau_s) {
  return 0.5 * (1.0 - hom_overlap(a, b, tau_s));
}

HomScan hom_scan(const HeraldedState& a, const HeraldedState& b, std::vector<double> delays_s) {
  HomScan scan;
  scan.coincidence_probability.reserve(delays_s.size());
  for (double tau : delays_s) scan.coincidence_probability.push_back(coincidence_probability(a, b, tau));
  scan.delays_s = std::move(delays_s);
  scan.visibility = visibility(scan);
  return scan;
}

namespace {

double plateau(const std::vector<double>& p) {
  const std::size_t n = p.size();
  // outer 10% of the samples, split between both ends
  const std::size_t per_side = std::max<std::size_t>(1, (n + 19) / 20);
  double sum = 0.0;
  for (std::size_t k = 0; k < per_side; ++k) {
    for (double v : {p[k], p[n - 1 - k]}) {
      if (std::abs(v - 0.5) > 1e-2) {
        throw Error(ErrorKind::PlateauNotReached, "scan edges deviate from 0.5 by more than 1e-2");
      }
      sum += v;
    }
  }
  return sum / static_cast<double>(2 * per_side);
}

}  // namespace

double visibility(const HomScan& scan) {
  if (scan.coincidence_probability.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "HOM scan needs at least three delays");
  }
  const double p_inf = plateau(scan.coincidence_probability);
  const double p_min =
      *std::min_element(scan.coincidence_probability.begin(), scan.coincidence_probability.end());
  return std::clamp((p_inf - p_min) / p_inf, 0.0, 1.0);
}

std::vector<double> symmetric_delays(double half_range_s, std::size_t points) {
  if (points < 2 || !(half_range_s > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "delay grid needs >= 2 points and a positive range");
  }
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double twice = 2.0 * static_cast<double>(k) - static_cast<double>(points - 1);
    out[k] = half_range_s * twice / static_cast<double>(points - 1);
  }
  return out;
}

std::optional<double> dip_fwhm(const HomScan& scan) {
  const double p_inf = plateau(scan.coincidence_probability);
  std::vector<double> depth;
  depth.reserve(scan.coincidence_probability.size());
  for (double p : scan.coincidence_probability) depth.push_back(p_inf - p);
  return fwhm(scan.delays_s, depth);
}

BackgroundEstimate multi_pair_background(double threefold_rate_a, double signal_rate_b,
                                         double threefold_rate_b, double signal_rate_a,
                                         double coincidence_window_s, double duration_s,
                                         double baseline_counts) {
  for (double r : {threefold_rate_a, signal_rate_b, threefold_rate_b, signal_rate_a}) {
    if (!(r >= 0.0)) throw Error(ErrorKind::InvalidArgument, "rates must be non-negative");
  }
  if (!(coincidence_window_s > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "coincidence window must be positive");
  }
  if (!(duration_s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "duration must be non-negative");
  if (!(baseline_counts > 0.0)) throw Error(ErrorKind::InvalidArgument, "baseline must be positive");

  BackgroundEstimate out;
  out.background_counts = (threefold_rate_a * signal_rate_b + threefold_rate_b * signal_rate_a) *
                          coincidence_window_s * duration_s;
  out.visibility_correction = out.background_counts / baseline_counts;
  return out;
}

FourfoldScan simulate_fourfold_scan(const HeraldedState& a, const HeraldedState& b,
                                    const std::vector<double>& delays_s, double baseline_counts,
                                    double background_counts, std::optional<std::uint64_t> seed) {
  if (!(baseline_counts > 0.0)) throw Error(ErrorKind::InvalidArgument, "baseline must be positive");
  if (!(background_counts >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "background must be non-negative");
  }
  FourfoldScan scan;
  scan.delays_s = delays_s;
  scan.background_counts = background_counts;
  for (double tau : delays_s) {
    const double p = coincidence_probability(a, b, tau);
    scan.coincidence_probability.push_back(p);
    scan.expected_counts.push_back(baseline_counts * 2.0 * p + background_counts);
  }
  if (seed) {
    std::mt19937_64 rng(*seed);
    std::vector<std::int64_t> sampled;
    sampled.reserve(delays_s.size());
    for (double mean : scan.expected_counts) {
      if (mean <= 0.0) {
        sampled.push_back(0);
        continue;
      }
      std::poisson_distribution<std::int64_t> dist(mean);
      sampled.push_back(dist(rng));
    }
    scan.sampled_counts = std::move(sampled);
  }
  return scan;
}

void write_scan_csv(const FourfoldScan& scan, std::ostream& os) {
  os << "delay_ps,probability,expected_counts,sampled_counts\n";
  os.precision(12);
  for (std::size_t k = 0; k < scan.delays_s.size(); ++k) {
    os << scan.delays_s[k] * 1e12 << ',' << scan.coincidence_probability[k] << ','
       << scan.expected_counts[k] << ',';
    if (scan.sampled_counts) os << (*scan.sampled_counts)[k];
    os << '\n';
  }
}

}  // namespace sfwm
