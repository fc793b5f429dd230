#include "sfwm/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sfwm/error.hpp"

namespace sfwm {

TuningCurve pump_tuning_curve(const BirefringentFiber& fiber, double pump_lo_nm, double pump_hi_nm,
                              std::size_t steps) {
  if (steps == 0 || pump_hi_nm < pump_lo_nm) {
    throw Error(ErrorKind::InvalidArgument, "tuning range needs lo <= hi and at least one step");
  }
  TuningCurve curve;
  for (std::size_t k = 0; k < steps; ++k) {
    const double lp = steps == 1 ? pump_lo_nm
                                 : pump_lo_nm + (pump_hi_nm - pump_lo_nm) * static_cast<double>(k) /
                                                    static_cast<double>(steps - 1);
    try {
      curve.rows.push_back(solve_central(fiber, lp));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSolution) throw;
      curve.omitted_pump_nm.push_back(lp);
    }
  }
  if (curve.rows.empty()) throw Error(ErrorKind::EmptyCurve, "no pump wavelength phase matches");
  return curve;
}

double birefringence_sensitivity(const BirefringentFiber& fiber, double lambda_p_nm, double step) {
  const double up = solve_central(fiber.with_delta_n(fiber.delta_n + step), lambda_p_nm).lambda_i_nm;
  const double down = solve_central(fiber.with_delta_n(fiber.delta_n - step), lambda_p_nm).lambda_i_nm;
  return (up - down) / (2.0 * step);
}

PressureScanResult pressure_scan(const BirefringentFiber& fiber_a, const BirefringentFiber& fiber_b,
                                 const std::vector<double>& delta_n_offsets,
                                 const PumpEnvelope& pump,
                                 const std::optional<SpectralFilter>& herald_filter,
                                 const GridSpec& grid) {
  const TwoPhotonEnvelope envelope(pump);
  const SpectralGrid shared = default_grid(fiber_b, envelope, grid);
  const HeraldedState reference =
      heralded_density_matrix(build_jsa(fiber_b, envelope, shared), herald_filter);

  PressureScanResult res;
  for (double offset : delta_n_offsets) {
    const BirefringentFiber a = fiber_a.with_delta_n(fiber_a.delta_n + offset);
    PressureScanRow row;
    row.delta_n_offset = offset;
    row.idler_nm = solve_central(a, pump.center_nm).lambda_i_nm;
    const HeraldedState state = heralded_density_matrix(build_jsa(a, envelope, shared), herald_filter);
    row.visibility = hom_overlap(state, reference, 0.0);
    res.rows.push_back(row);
  }
  if (!res.rows.empty()) {
    const auto [lo, hi] = std::minmax_element(
        res.rows.begin(), res.rows.end(),
        [](const PressureScanRow& x, const PressureScanRow& y) { return x.idler_nm < y.idler_nm; });
    res.total_idler_shift_nm = hi->idler_nm - lo->idler_nm;
  }
  return res;
}

double purity_for_bandwidth(const BirefringentFiber& fiber, PumpEnvelope pump, double fwhm_nm,
                            const GridSpec& grid) {
  pump.fwhm_nm = fwhm_nm;
  const TwoPhotonEnvelope envelope(pump);
  return schmidt(build_jsa(fiber, envelope, default_grid(fiber, envelope, grid))).purity;
}

BandwidthOptimum optimize_pump_bandwidth(const BirefringentFiber& fiber, const PumpEnvelope& pump,
                                         double lower_nm, double upper_nm, double tolerance_nm,
                                         const GridSpec& grid) {
  if (!(lower_nm >= 0.05 && upper_nm <= 2.0 && lower_nm < upper_nm)) {
    throw Error(ErrorKind::InvalidArgument, "bandwidth bounds must satisfy 0.05 <= lo < hi <= 2.0 nm");
  }
  if (!(tolerance_nm > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");

  std::map<double, double> memo;
  const auto purity = [&](double w) {
    if (const auto it = memo.find(w); it != memo.end()) return it->second;
    const double p = purity_for_bandwidth(fiber, pump, w, grid);
    memo.emplace(w, p);
    return p;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  BandwidthOptimum out;
  double a = lower_nm;
  double b = upper_nm;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = purity(c);
  double fd = purity(d);
  out.bracket_history.emplace_back(a, b);
  while (b - a > tolerance_nm) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = purity(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = purity(d);
    }
    out.bracket_history.emplace_back(a, b);
  }

  out.optimal_fwhm_nm = fc > fd ? c : d;
  out.purity = std::max(fc, fd);
  out.purity_at_lower = purity(lower_nm);
  out.purity_at_upper = purity(upper_nm);
  out.evaluations = memo.size();

  const bool at_bound = out.optimal_fwhm_nm - lower_nm <= tolerance_nm ||
                        upper_nm - out.optimal_fwhm_nm <= tolerance_nm;
  if (at_bound || out.purity_at_lower >= out.purity || out.purity_at_upper >= out.purity) {
    std::ostringstream os;
    os << "purity maximum at " << out.optimal_fwhm_nm << " nm is not interior to [" << lower_nm
       << ", " << upper_nm << "] nm";
    throw Error(ErrorKind::BoundaryMaximum, os.str());
  }
  return out;
}

std::vector<FilterTradeoffRow> filter_tradeoff_curve(const JointSpectralAmplitude& jsa,
                                                     const SpectralFilter& shape,
                                                     const std::vector<double>& widths_nm) {
  std::vector<FilterTradeoffRow> rows;
  rows.reserve(widths_nm.size());
  for (double w : widths_nm) {
    if (!(w > 0.0)) throw Error(ErrorKind::InvalidArgument, "filter widths must be positive");
    SpectralFilter f = shape;
    f.fwhm_nm = w;
    const HeraldedState st = heralded_density_matrix(jsa, f);
    rows.push_back({w, st.purity(), st.herald_probability});
  }
  return rows;
}

}  // namespace sfwm
