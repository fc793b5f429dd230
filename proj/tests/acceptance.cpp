#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "paper_setup.hpp"
#include "sfwm/counts.hpp"
#include "sfwm/error.hpp"
#include "sfwm/hom.hpp"
#include "sfwm/tuning.hpp"

using namespace sfwm;
using namespace sfwm::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const JointSpectralAmplitude& paper_jsa() {
  static const JointSpectralAmplitude jsa = [] {
    const auto fiber = paper_fiber();
    const TwoPhotonEnvelope env(paper_pump());
    return build_jsa(fiber, env, default_grid(fiber, env));
  }();
  return jsa;
}

Outcome c1_round_trip() {
  const auto t0 = Clock::now();
  const double dn = calibrate_delta_n(fused_silica(), kPumpNm, kSignalNm, kIdlerNm);
  BirefringentFiber f;
  f.delta_n = dn;
  f.length_m = kLengthM;
  const auto sol = solve_central(f, kPumpNm);
  const double elapsed = seconds_since(t0);
  const double ds = std::abs(sol.lambda_s_nm - kSignalNm);
  const double di = std::abs(sol.lambda_i_nm - kIdlerNm);
  const double lhs = 2.0 / sol.lambda_p_nm;
  const double energy = std::abs(lhs - 1.0 / sol.lambda_s_nm - 1.0 / sol.lambda_i_nm) / lhs;
  return {ds <= 0.5 && di <= 0.5 && energy < 1e-9 && elapsed < 1.0,
          fmt("delta_n=%.6e signal=%.4f nm idler=%.4f nm energy_residual=%.1e runtime=%.3f s", dn,
              sol.lambda_s_nm, sol.lambda_i_nm, energy, elapsed)};
}

Outcome c2_gvm() {
  const auto fiber = paper_fiber();
  const auto sol = solve_central(fiber, kPumpNm);
  const auto g = gvm_classify(fiber, sol.lambda_p_nm * 1e-3, sol.lambda_s_nm * 1e-3, sol.lambda_i_nm * 1e-3);
  const bool between = (g.v_signal < g.v_pump && g.v_pump < g.v_idler) ||
                       (g.v_idler < g.v_pump && g.v_pump < g.v_signal);
  return {g.regime == GvmRegime::PumpBetween && between,
          fmt("v_s=%.6e v_p=%.6e v_i=%.6e m/s regime=%s", g.v_signal, g.v_pump, g.v_idler,
              to_string(g.regime).c_str())};
}

Outcome c3_unfiltered_purity() {
  const auto fiber = paper_fiber();
  const TwoPhotonEnvelope env(paper_pump());
  const auto t0 = Clock::now();
  const auto jsa = build_jsa(fiber, env, default_grid(fiber, env));
  const double p = schmidt(jsa).purity;
  const double elapsed = seconds_since(t0);
  GridSpec fine;
  fine.points = 1024;
  const double pf = schmidt(build_jsa(fiber, env, default_grid(fiber, env, fine))).purity;
  const double change = std::abs(pf - p);
  return {p >= 0.70 && p <= 0.85 && change < 1e-3 && elapsed < 30.0,
          fmt("purity_512=%.5f purity_1024=%.5f change=%.1e runtime=%.2f s", p, pf, change, elapsed)};
}

Outcome c4_filtered_purity() {
  const auto& jsa = paper_jsa();
  const double p2 = heralded_density_matrix(jsa, herald_filter(2.0)).purity();
  const double p2_rect = heralded_density_matrix(jsa, herald_filter(2.0, FilterShape::Rectangular)).purity();
  const std::vector<double> widths = {5.0, 3.0, 2.0, 1.5, 1.0, 0.75, 0.5, 0.3, 0.2, 0.1};
  const auto rows = filter_tradeoff_curve(jsa, herald_filter(1.0), widths);
  double best_width = 0.0;
  double best_purity = 0.0;
  for (const auto& r : rows) {
    if (r.purity >= 0.99 && best_width == 0.0) {
      best_width = r.width_nm;
      best_purity = r.purity;
    }
  }
  return {p2 >= 0.84 && best_width > 0.0,
          fmt("purity_2nm=%.4f (rectangular %.4f), threshold 0.84; first width with purity>=0.99: %.2f nm (%.4f)",
              p2, p2_rect, best_width, best_purity)};
}

HeraldedState gaussian_state(const std::vector<double>& axis, double center, double sigma) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(axis.size()));
  for (std::size_t k = 0; k < axis.size(); ++k) {
    const double x = axis[k] - center;
    v(static_cast<Eigen::Index>(k)) = std::exp(-x * x / (4.0 * sigma * sigma));
  }
  return HeraldedState::from_pure(axis, v);
}

Outcome c5_hom_identity() {
  const auto st = heralded_density_matrix(paper_jsa());
  const double purity = schmidt(paper_jsa()).purity;
  const auto scan = hom_scan(st, st, symmetric_delays(20e-12, 201));
  const double ideal_v = 1.0 - 2.0 * coincidence_probability(st, st, 0.0);
  const double identity_err = std::abs(ideal_v - purity);

  const double w0 = 2.2e15;
  const double sigma = 1e12;
  std::vector<double> axis(1024);
  for (std::size_t k = 0; k < axis.size(); ++k) {
    axis[k] = w0 - 20.0 * sigma + 40.0 * sigma * (static_cast<double>(k) + 0.5) / 1024.0;
  }
  const auto a = gaussian_state(axis, w0, sigma);
  double gauss_err = 0.0;
  for (double d : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const double v = hom_overlap(a, gaussian_state(axis, w0 + d * sigma, sigma), 0.0);
    gauss_err = std::max(gauss_err, std::abs(v - std::exp(-d * d / 4.0)));
  }
  return {identity_err < 1e-10 && gauss_err < 1e-4,
          fmt("V=%.10f purity=%.10f |diff|=%.1e (scan V=%.6f); gaussian max error=%.1e", ideal_v, purity,
              identity_err, scan.visibility, gauss_err)};
}

CountRates paper_rates() {
  CountRates r;
  r.signal = 82600.0;
  r.idler = 177000.0;
  r.coincidence = 26600.0;
  r.duration_s = 1.0;
  return r;
}

Outcome c6_efficiency() {
  const auto r = paper_rates();
  const double eta_h = heralding_efficiency(r, 0.38);
  const double overall = overall_detection_efficiency(r);
  const double ph = herald_probability_per_pulse(eta_h, r.signal, 76e6);
  const bool ok = std::abs(eta_h - 0.847) <= 0.005 && std::abs(overall - 0.322) < 5e-4 &&
                  std::abs(ph - 9.2e-4) < 0.05e-4;
  return {ok, fmt("eta_h=%.4f (%.0f%%) overall=%.4f P_h=%.3e (~%.3f)", eta_h, 100.0 * eta_h, overall, ph, ph)};
}

Outcome c7_statistics() {
  const auto inv = invert_rates(paper_rates(), 0.38, 76e6);
  const double t = 10.0;
  const auto res = forward_count_model(inv.model, inv.chain, t, derive_seed(20110411, 2));
  const auto z = [&](std::uint64_t n, double rate) {
    const double e = rate * t;
    return (static_cast<double>(n) - e) / std::sqrt(e);
  };
  const double zs = z(res.counts.herald, res.exact.signal);
  const double zi = z(res.counts.idler, res.exact.idler);
  const double zc = z(res.counts.coincidence, res.exact.coincidence);
  const bool ok = res.heralded_g2 >= 0.005 && res.heralded_g2 <= 0.05 && std::abs(zs) <= 3.0 &&
                  std::abs(zi) <= 3.0 && std::abs(zc) <= 3.0;
  return {ok, fmt("mu=%.4e g2=%.4f (threefolds=%llu) z_s=%.2f z_i=%.2f z_c=%.2f", inv.model.mean_pairs_per_pulse,
                  res.heralded_g2, static_cast<unsigned long long>(res.counts.threefold), zs, zi, zc)};
}

Outcome c8_optimizer() {
  const auto pump = paper_pump();
  const auto a = optimize_pump_bandwidth(paper_fiber(), pump, 0.1, 1.0);
  const auto b = optimize_pump_bandwidth(paper_fiber(2.0 * kLengthM), pump, 0.1, 1.0);
  const double ratio = a.optimal_fwhm_nm / b.optimal_fwhm_nm;
  const bool interior = a.purity >= a.purity_at_lower && a.purity >= a.purity_at_upper;
  const bool ok = interior && a.optimal_fwhm_nm >= 0.2 && a.optimal_fwhm_nm <= 0.5 && ratio >= 1.6 && ratio <= 2.4;
  return {ok, fmt("L=9cm optimum=%.4f nm (purity %.4f; bounds %.4f/%.4f) L=18cm optimum=%.4f nm ratio=%.3f",
                  a.optimal_fwhm_nm, a.purity, a.purity_at_lower, a.purity_at_upper, b.optimal_fwhm_nm, ratio)};
}

Outcome c9_pressure_scan() {
  const auto fiber = paper_fiber();
  const double sens = birefringence_sensitivity(fiber, kPumpNm);
  const double half = 0.10 / sens;
  const std::vector<double> offsets = {-2.0 * half, -half, 0.0, half, 2.0 * half};
  const auto res = pressure_scan(fiber, fiber, offsets, paper_pump(), herald_filter(2.0));
  const auto& r = res.rows;
  const double li0 = r[2].idler_nm;
  // offsets producing |dl_i| = 0.20 nm are the outer pair
  bool monotone = true;
  for (std::size_t k = 1; k < r.size(); ++k) monotone = monotone && r[k].idler_nm > r[k - 1].idler_nm;
  bool max_at_zero = true;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (k != 2) max_at_zero = max_at_zero && r[k].visibility < r[2].visibility;
  }
  const bool shift_ok = std::abs(std::abs(r[0].idler_nm - li0) - 0.20) < 0.01 &&
                        std::abs(std::abs(r[4].idler_nm - li0) - 0.20) < 0.01;
  std::string vis;
  for (const auto& row : r) vis += fmt("%.4f ", row.visibility);
  return {monotone && max_at_zero && shift_ok,
          fmt("idler %.3f..%.3f nm, visibilities %s(max at zero offset: %s)", r.front().idler_nm,
              r.back().idler_nm, vis.c_str(), max_at_zero ? "yes" : "no")};
}

Outcome c10_background() {
  const auto a = multi_pair_background(2.0, 82600.0, 2.0, 82600.0, 3e-9, 3027.0, 300.0);
  const auto b = multi_pair_background(2.0, 82600.0, 2.0, 82600.0, 3e-9, 1009.0, 100.0);
  const auto w2 = multi_pair_background(2.0, 82600.0, 2.0, 82600.0, 6e-9, 3027.0, 300.0);
  const auto t2 = multi_pair_background(2.0, 82600.0, 2.0, 82600.0, 3e-9, 6054.0, 300.0);
  const bool linear = std::abs(w2.background_counts / a.background_counts - 2.0) < 1e-12 &&
                      std::abs(t2.background_counts / a.background_counts - 2.0) < 1e-12;
  const bool ok = std::abs(a.visibility_correction - 0.01) < 5e-4 &&
                  std::abs(b.visibility_correction - 0.01) < 5e-4 && linear;
  return {ok, fmt("run A: %.3f counts dV=%.4f; run B: %.3f counts dV=%.4f; linear in window and duration: %s",
                  a.background_counts, a.visibility_correction, b.background_counts, b.visibility_correction,
                  linear ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 phase-matching round trip", c1_round_trip},
      {"2 GVM regime", c2_gvm},
      {"3 unfiltered purity", c3_unfiltered_purity},
      {"4 filtered purity", c4_filtered_purity},
      {"5 HOM identity", c5_hom_identity},
      {"6 efficiency arithmetic", c6_efficiency},
      {"7 photon statistics", c7_statistics},
      {"8 bandwidth optimizer", c8_optimizer},
      {"9 tuning / pressure scan", c9_pressure_scan},
      {"10 background correction", c10_background},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
