#include "sfwm/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "sfwm/config.hpp"
#include "sfwm/counts.hpp"
#include "sfwm/error.hpp"
#include "sfwm/hom.hpp"
#include "sfwm/tuning.hpp"

namespace sfwm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Seed streams derived from the top-level seed, one per randomized task.
constexpr std::uint64_t kSeedStreamHomSampling = 1;
constexpr std::uint64_t kSeedStreamMonteCarlo = 2;

enum class Format { Csv, Json };

// Collects output files; everything written so far is removed if the command
// fails part way.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

  void write(const std::string& name, const std::string& content, bool binary = false) {
    fs::create_directories(dir_);
    const fs::path target = dir_ / name;
    const fs::path tmp = dir_ / (name + ".partial");
    {
      std::ofstream os(tmp, binary ? std::ios::binary : std::ios::out);
      if (!os) throw Error(ErrorKind::ConfigInvalid, "cannot write " + tmp.string());
      os << content;
      if (!os) throw Error(ErrorKind::ConfigInvalid, "write failed for " + tmp.string());
    }
    written_.push_back(tmp);
    fs::rename(tmp, target);
    written_.back() = target;
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Short scientific form such as 9.2e-4.
std::string sci(double v, int significant) {
  if (v == 0.0) return "0";
  const int exponent = static_cast<int>(std::floor(std::log10(std::abs(v))));
  double mantissa = v / std::pow(10.0, exponent);
  std::ostringstream os;
  os << std::fixed << std::setprecision(significant - 1) << mantissa << "e" << exponent;
  return os.str();
}

// Table rendered either as CSV (header with units) or a JSON array of records.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string render(Format format) const {
    if (format == Format::Json) {
      json arr = json::array();
      for (const auto& r : rows) {
        json rec = json::object();
        for (std::size_t c = 0; c < columns.size(); ++c) rec[columns[c]] = r[c];
        arr.push_back(rec);
      }
      return arr.dump(2) + "\n";
    }
    std::ostringstream os;
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n' << std::setprecision(12);
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
      os << '\n';
    }
    return os.str();
  }

  std::string file_name(const std::string& stem, Format format) const {
    return stem + (format == Format::Json ? ".json" : ".csv");
  }
};

std::string record(const json& j, Format format) {
  if (format == Format::Json) return j.dump(2) + "\n";
  std::ostringstream os;
  os << "key,value\n" << std::setprecision(12);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_primitive()) os << it.key() << ',' << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
  }
  return os.str();
}

std::string record_name(const std::string& stem, Format format) {
  return stem + (format == Format::Json ? ".json" : ".csv");
}

struct Context {
  RunConfig cfg;
  Format format = Format::Csv;
  OutputSet* out = nullptr;
};

HeraldedState herald(const BirefringentFiber& fiber, const TwoPhotonEnvelope& env,
                     const SpectralGrid& grid, const std::optional<SpectralFilter>& filter) {
  return heralded_density_matrix(build_jsa(fiber, env, grid), filter);
}

std::string cmd_calibrate(Context& ctx) {
  if (!ctx.cfg.calibration) {
    throw Error(ErrorKind::ConfigInvalid, "fiber.calibration: missing required key");
  }
  const auto& t = *ctx.cfg.calibration;
  const double dn = calibrate_delta_n(ctx.cfg.fiber.base, t.pump_nm, t.signal_nm, t.idler_nm);
  const PhaseMatchSolution sol = solve_central(ctx.cfg.fiber.with_delta_n(dn), t.pump_nm);
  const double ds = std::abs(sol.lambda_s_nm - t.signal_nm);
  const double di = std::abs(sol.lambda_i_nm - t.idler_nm);
  const bool ok = ds <= 0.5 && di <= 0.5;

  json j;
  j["delta_n"] = dn;
  j["pump_nm"] = t.pump_nm;
  j["signal_nm"] = sol.lambda_s_nm;
  j["idler_nm"] = sol.lambda_i_nm;
  j["residual_delta_k_rad_per_m"] = sol.residual_delta_k;
  j["roundtrip_signal_error_nm"] = ds;
  j["roundtrip_idler_error_nm"] = di;
  j["roundtrip_ok"] = ok;
  ctx.out->write(record_name("calibration", ctx.format), record(j, ctx.format));
  if (!ok) {
    throw Error(ErrorKind::NoSolution, "round trip misses the calibration triple by more than 0.5 nm");
  }
  return "delta_n=" + sci(dn, 6) + " signal_nm=" + fixed(sol.lambda_s_nm, 3) +
         " idler_nm=" + fixed(sol.lambda_i_nm, 3) + " roundtrip_ok=true";
}

std::string cmd_jsa(Context& ctx) {
  const TwoPhotonEnvelope env(ctx.cfg.pump, ctx.cfg.envelope_mode);
  const SpectralGrid grid = default_grid(ctx.cfg.fiber, env, ctx.cfg.grid);
  const JointSpectralAmplitude jsa = build_jsa(ctx.cfg.fiber, env, grid);

  std::ostringstream bin;
  write_jsa_binary(jsa, bin);
  ctx.out->write("jsa.bin", bin.str(), true);
  if (ctx.format == Format::Csv) {
    std::ostringstream csv;
    write_jsa_csv(jsa, csv);
    ctx.out->write("jsa.csv", csv.str());
  }

  Table marg{{"arm", "omega_rad_per_s", "wavelength_nm", "intensity"}, {}};
  const MarginalSpectrum ms = marginal_spectrum(jsa, Arm::Signal);
  const MarginalSpectrum mi = marginal_spectrum(jsa, Arm::Idler);
  for (std::size_t k = 0; k < ms.omega.size(); ++k) {
    marg.rows.push_back({0.0, ms.omega[k], ms.wavelength_nm[k], ms.intensity[k]});
  }
  for (std::size_t k = 0; k < mi.omega.size(); ++k) {
    marg.rows.push_back({1.0, mi.omega[k], mi.wavelength_nm[k], mi.intensity[k]});
  }
  ctx.out->write(marg.file_name("marginals", ctx.format), marg.render(ctx.format));

  return "rows=" + std::to_string(grid.rows()) + " cols=" + std::to_string(grid.cols()) +
         " signal_fwhm_nm=" + fixed(ms.fwhm_nm.value_or(NAN), 4) +
         " idler_fwhm_nm=" + fixed(mi.fwhm_nm.value_or(NAN), 4) +
         " purity=" + fixed(schmidt(jsa).purity, 4);
}

std::string cmd_purity(Context& ctx) {
  const TwoPhotonEnvelope env(ctx.cfg.pump, ctx.cfg.envelope_mode);
  const SpectralGrid grid = default_grid(ctx.cfg.fiber, env, ctx.cfg.grid);
  const JointSpectralAmplitude jsa = build_jsa(ctx.cfg.fiber, env, grid);
  const SchmidtDecomposition sd = schmidt(jsa);

  json j;
  j["purity"] = sd.purity;
  j["schmidt_number"] = sd.schmidt_number;
  for (std::size_t k = 0; k < std::min<std::size_t>(5, sd.probabilities.size()); ++k) {
    j["schmidt_p" + std::to_string(k)] = sd.probabilities[k];
  }
  std::string summary = "purity=" + fixed(sd.purity, 4) + " schmidt_number=" + fixed(sd.schmidt_number, 4);
  if (ctx.cfg.herald_filter) {
    const HeraldedState st = heralded_density_matrix(jsa, ctx.cfg.herald_filter);
    j["filtered_purity"] = st.purity();
    j["herald_probability"] = st.herald_probability;
    summary += " filtered_purity=" + fixed(st.purity(), 4) +
               " herald_probability=" + fixed(st.herald_probability, 4);
  }
  ctx.out->write(record_name("purity", ctx.format), record(j, ctx.format));
  return summary;
}

std::string cmd_hom(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const TwoPhotonEnvelope env(cfg.pump, cfg.envelope_mode);
  const SpectralGrid grid = default_grid(cfg.fiber, env, cfg.grid);
  const BirefringentFiber fiber_b = cfg.fiber.with_delta_n(cfg.fiber.delta_n + cfg.hom.delta_n_offset_b);
  const HeraldedState a = herald(cfg.fiber, env, grid, cfg.herald_filter);
  const HeraldedState b = herald(fiber_b, env, grid, cfg.herald_filter);

  double background = 0.0;
  double delta_v = 0.0;
  if (cfg.hom.background) {
    const auto& bg = *cfg.hom.background;
    const BackgroundEstimate est =
        multi_pair_background(bg.threefold_rate_a_hz, bg.signal_rate_b_hz, bg.threefold_rate_b_hz,
                              bg.signal_rate_a_hz, bg.window_s, bg.duration_s, cfg.hom.baseline_counts);
    background = est.background_counts;
    delta_v = est.visibility_correction;
  }

  const auto delays = symmetric_delays(cfg.hom.half_range_ps * 1e-12, cfg.hom.points);
  const FourfoldScan scan = simulate_fourfold_scan(a, b, delays, cfg.hom.baseline_counts, background,
                                                   derive_seed(cfg.seed, kSeedStreamHomSampling));
  HomScan hs{scan.delays_s, scan.coincidence_probability, 0.0};
  hs.visibility = visibility(hs);
  const auto width = dip_fwhm(hs);

  if (ctx.format == Format::Csv) {
    std::ostringstream os;
    write_scan_csv(scan, os);
    ctx.out->write("hom_scan.csv", os.str());
  } else {
    Table t{{"delay_ps", "probability", "expected_counts", "sampled_counts"}, {}};
    for (std::size_t k = 0; k < scan.delays_s.size(); ++k) {
      t.rows.push_back({scan.delays_s[k] * 1e12, scan.coincidence_probability[k], scan.expected_counts[k],
                        static_cast<double>((*scan.sampled_counts)[k])});
    }
    ctx.out->write("hom_scan.json", t.render(Format::Json));
  }

  json j;
  j["visibility"] = hs.visibility;
  j["overlap_at_zero_delay"] = hom_overlap(a, b, 0.0);
  j["purity_a"] = a.purity();
  j["purity_b"] = b.purity();
  j["dip_fwhm_ps"] = width ? *width * 1e12 : -1.0;
  j["background_counts"] = background;
  j["visibility_correction"] = delta_v;
  ctx.out->write(record_name("hom_summary", ctx.format), record(j, ctx.format));

  return "visibility=" + fixed(hs.visibility, 4) + " dip_fwhm_ps=" + fixed(width ? *width * 1e12 : NAN, 3) +
         " background=" + fixed(background, 3) + " delta_v=" + fixed(delta_v, 4);
}

std::string cmd_rates(Context& ctx) {
  if (!ctx.cfg.rates) throw Error(ErrorKind::ConfigInvalid, "rates: missing required key");
  const RatesConfig& rc = *ctx.cfg.rates;
  const double eta_h = heralding_efficiency(rc.measured, rc.detector_efficiency);
  const double overall = overall_detection_efficiency(rc.measured);
  const double p_h = herald_probability_per_pulse(eta_h, rc.measured.signal, rc.repetition_rate_hz);

  json j;
  j["eta_h"] = eta_h;
  j["overall_detection_efficiency"] = overall;
  j["herald_probability_per_pulse"] = p_h;
  std::string summary = "eta_h=" + fixed(eta_h, 3) + " overall=" + fixed(overall, 3) + " P_h=" + sci(p_h, 2);

  if (rc.monte_carlo_duration_s) {
    InvertedSource inv = invert_rates(rc.measured, rc.detector_efficiency, rc.repetition_rate_hz);
    inv.model.statistics = rc.statistics;
    const ForwardCountResult res = forward_count_model(
        inv.model, inv.chain, *rc.monte_carlo_duration_s, derive_seed(ctx.cfg.seed, kSeedStreamMonteCarlo));
    const double t = res.rates.duration_s;
    const auto ci = [&](std::uint64_t n) { return std::sqrt(static_cast<double>(n)) / t; };
    j["mc_mean_pairs_per_pulse"] = inv.model.mean_pairs_per_pulse;
    j["mc_duration_s"] = t;
    j["mc_signal_hz"] = res.rates.signal;
    j["mc_signal_hz_sigma"] = ci(res.counts.herald);
    j["mc_idler_hz"] = res.rates.idler;
    j["mc_idler_hz_sigma"] = ci(res.counts.idler);
    j["mc_coincidence_hz"] = res.rates.coincidence;
    j["mc_coincidence_hz_sigma"] = ci(res.counts.coincidence);
    j["mc_threefold_counts"] = res.counts.threefold;
    j["analytic_signal_hz"] = res.first_order.signal;
    j["analytic_idler_hz"] = res.first_order.idler;
    j["analytic_coincidence_hz"] = res.first_order.coincidence;
    j["heralded_g2"] = res.heralded_g2;
    j["heralded_g2_sigma"] =
        res.counts.threefold > 0 ? res.heralded_g2 / std::sqrt(static_cast<double>(res.counts.threefold)) : 0.0;
    summary += " g2=" + fixed(res.heralded_g2, 4);
  }
  ctx.out->write(record_name("rates", ctx.format), record(j, ctx.format));
  return summary;
}

std::string cmd_tune(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const TuningCurve curve = pump_tuning_curve(cfg.fiber, cfg.tune.pump_lo_nm, cfg.tune.pump_hi_nm, cfg.tune.steps);
  Table tc{{"pump_nm", "signal_nm", "idler_nm", "residual_delta_k_rad_per_m"}, {}};
  for (const auto& r : curve.rows) tc.rows.push_back({r.lambda_p_nm, r.lambda_s_nm, r.lambda_i_nm, r.residual_delta_k});
  ctx.out->write(tc.file_name("tuning_curve", ctx.format), tc.render(ctx.format));

  const double sens = birefringence_sensitivity(cfg.fiber, cfg.pump.center_nm);
  std::vector<double> offsets;
  const std::size_t n = cfg.tune.scan_points;
  for (std::size_t k = 0; k < n; ++k) {
    const double frac = -0.5 + static_cast<double>(k) / static_cast<double>(n - 1);
    offsets.push_back(frac * cfg.tune.idler_shift_nm / sens);
  }
  const PressureScanResult scan = pressure_scan(cfg.fiber, cfg.fiber, offsets, cfg.pump, cfg.herald_filter, cfg.grid);
  Table ps{{"delta_n_offset", "idler_nm", "visibility"}, {}};
  double best_v = -1.0;
  double best_offset = 0.0;
  for (const auto& r : scan.rows) {
    ps.rows.push_back({r.delta_n_offset, r.idler_nm, r.visibility});
    if (r.visibility > best_v) {
      best_v = r.visibility;
      best_offset = r.delta_n_offset;
    }
  }
  ctx.out->write(ps.file_name("pressure_scan", ctx.format), ps.render(ctx.format));

  return "sensitivity_nm_per_dn=" + sci(sens, 4) + " idler_shift_nm=" + fixed(scan.total_idler_shift_nm, 3) +
         " best_offset=" + sci(best_offset, 2) + " visibility_max=" + fixed(best_v, 4) +
         " omitted=" + std::to_string(curve.omitted_pump_nm.size());
}

std::string cmd_optimize(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const BandwidthOptimum opt = optimize_pump_bandwidth(cfg.fiber, cfg.pump, cfg.optimize.lower_nm,
                                                       cfg.optimize.upper_nm, cfg.optimize.tolerance_nm, cfg.grid);
  json j;
  j["optimal_fwhm_nm"] = opt.optimal_fwhm_nm;
  j["purity"] = opt.purity;
  j["purity_at_lower"] = opt.purity_at_lower;
  j["purity_at_upper"] = opt.purity_at_upper;
  j["evaluations"] = opt.evaluations;
  j["bounds_nm"] = {cfg.optimize.lower_nm, cfg.optimize.upper_nm};
  json hist = json::array();
  for (const auto& [a, b] : opt.bracket_history) hist.push_back({a, b});
  j["bracket_history_nm"] = hist;
  ctx.out->write("optimize.json", j.dump(2) + "\n");

  const TwoPhotonEnvelope env(cfg.pump, cfg.envelope_mode);
  const JointSpectralAmplitude jsa = build_jsa(cfg.fiber, env, default_grid(cfg.fiber, env, cfg.grid));
  SpectralFilter shape;
  if (cfg.herald_filter) {
    shape = *cfg.herald_filter;
  } else {
    shape.center_nm = solve_central(cfg.fiber, cfg.pump.center_nm).lambda_s_nm;
  }
  const auto rows = filter_tradeoff_curve(jsa, shape, cfg.optimize.filter_widths_nm);
  Table t{{"filter_fwhm_nm", "purity", "herald_probability"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.width_nm, r.purity, r.herald_probability});
  ctx.out->write(t.file_name("filter_tradeoff", ctx.format), t.render(ctx.format));

  return "optimum_fwhm_nm=" + fixed(opt.optimal_fwhm_nm, 4) + " purity=" + fixed(opt.purity, 4);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Birefringent-fiber SFWM heralded photon source toolkit", "sfwm"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string format = "csv";

  using Handler = std::function<std::string(Context&)>;
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"calibrate", "calibrate delta_n from a wavelength triple and re-solve", cmd_calibrate},
      {"jsa", "build and export the joint spectral amplitude", cmd_jsa},
      {"purity", "Schmidt purity, optionally with the herald filter", cmd_purity},
      {"hom", "two-source HOM scan with background and Poisson sampling", cmd_hom},
      {"rates", "heralding efficiency, P_h and Monte Carlo g2", cmd_rates},
      {"tune", "pump tuning curve and birefringence pressure scan", cmd_tune},
      {"optimize", "pump bandwidth optimization and filter trade-off", cmd_optimize},
  };
  std::vector<std::pair<CLI::App*, Handler>> subs;
  for (const auto& [name, help, handler] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the configuration seed");
    sub->add_option("--format", format, "tabular output format")->check(CLI::IsMember({"csv", "json"}));
    subs.emplace_back(sub, handler);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    Context ctx;
    ctx.cfg = load_config(config_path);
    if (seed) ctx.cfg.seed = *seed;
    ctx.format = format == "json" ? Format::Json : Format::Csv;
    OutputSet files(out_dir);
    ctx.out = &files;
    for (const auto& [sub, handler] : subs) {
      if (sub->parsed()) {
        const std::string summary = handler(ctx);
        files.commit();
        out << sub->get_name() << ": " << summary << "\n";
        return 0;
      }
    }
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace sfwm
