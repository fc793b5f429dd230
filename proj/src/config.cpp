#include "sfwm/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "sfwm/error.hpp"

namespace sfwm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::ConfigInvalid, path + ": " + msg);
}

// Object view that records which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) fail(key_path(key), "missing required key");
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(key_path(key), "expected a number");
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) fail(key_path(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string_or(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) fail(key_path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected_size = 0) {
    const json& v = raw(key);
    if (!v.is_array()) fail(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key_path(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    if (expected_size != 0 && out.size() != expected_size) {
      fail(key_path(key), "expected " + std::to_string(expected_size) + " entries");
    }
    return out;
  }

  const std::string& path() const { return path_; }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Module validation errors raised while loading are configuration errors.
template <typename F>
void validated(const std::string& path, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) fail(path, e.what());
    throw;
  }
}

SellmeierModel parse_sellmeier(Section& fiber) {
  if (!fiber.has("sellmeier")) return fused_silica();
  const json& v = fiber.raw("sellmeier");
  const std::string path = fiber.key_path("sellmeier");
  if (v.is_string()) {
    if (v.get<std::string>() == "fused_silica") return fused_silica();
    fail(path, "unknown built-in model '" + v.get<std::string>() + "'");
  }
  Section s(v, path);
  SellmeierModel m;
  m.name = s.string_or("name", "custom");
  const auto b = s.numbers("b", 3);
  const auto c = s.numbers("c_um2", 3);
  std::copy(b.begin(), b.end(), m.b.begin());
  std::copy(c.begin(), c.end(), m.c.begin());
  if (s.has("window_um")) {
    const auto w = s.numbers("window_um", 2);
    m.window_min_um = w[0];
    m.window_max_um = w[1];
  }
  s.finish();
  validated(path, [&] { m.validate(); });
  return m;
}

SpectralFilter parse_filter(Section s) {
  SpectralFilter f;
  f.center_nm = s.number("center_nm");
  f.fwhm_nm = s.number("fwhm_nm");
  const std::string shape = s.string_or("shape", "super_gaussian");
  if (shape == "super_gaussian") {
    f.shape = FilterShape::SuperGaussian;
  } else if (shape == "rectangular") {
    f.shape = FilterShape::Rectangular;
  } else {
    fail(s.key_path("shape"), "expected 'super_gaussian' or 'rectangular'");
  }
  f.order = static_cast<int>(s.unsigned_or("order", 4));
  f.peak_transmission = s.number_or("peak_transmission", 1.0);
  s.finish();
  validated(s.path(), [&] { f.validate(); });
  return f;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("<root>", std::string("malformed JSON: ") + e.what());
  }

  RunConfig cfg;
  Section top(root, "");
  const json& version = top.raw("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kConfigSchemaVersion) {
    fail("schema_version", "expected " + std::to_string(kConfigSchemaVersion));
  }
  cfg.seed = top.unsigned_or("seed", 0);

  {
    Section fiber = top.child("fiber");
    cfg.fiber.base = parse_sellmeier(fiber);
    cfg.fiber.length_m = fiber.number("length_m");
    if (fiber.has("calibration")) {
      Section cal = fiber.child("calibration");
      CalibrationTriple t;
      t.pump_nm = cal.number("pump_nm");
      t.signal_nm = cal.number("signal_nm");
      t.idler_nm = cal.number("idler_nm");
      cal.finish();
      cfg.calibration = t;
    }
    if (fiber.has("delta_n")) {
      cfg.fiber.delta_n = fiber.number("delta_n");
    } else if (cfg.calibration) {
      cfg.fiber.delta_n = calibrate_delta_n(cfg.fiber.base, cfg.calibration->pump_nm,
                                            cfg.calibration->signal_nm, cfg.calibration->idler_nm);
    } else {
      fail("fiber.delta_n", "missing required key (or provide fiber.calibration)");
    }
    fiber.finish();
    validated("fiber", [&] { cfg.fiber.validate(); });
  }

  {
    Section pump = top.child("pump");
    cfg.pump.center_nm = pump.number("center_nm");
    cfg.pump.fwhm_nm = pump.number("fwhm_nm");
    const std::string shape = pump.string_or("shape", "sech2");
    if (shape == "sech2") {
      cfg.pump.shape = PumpShape::SechSquaredIntensity;
    } else if (shape == "gaussian") {
      cfg.pump.shape = PumpShape::GaussianIntensity;
    } else {
      fail("pump.shape", "expected 'sech2' or 'gaussian'");
    }
    const std::string env = pump.string_or("envelope", "self_convolution");
    if (env == "self_convolution") {
      cfg.envelope_mode = EnvelopeMode::SelfConvolution;
    } else if (env == "substitution") {
      cfg.envelope_mode = EnvelopeMode::Substitution;
    } else {
      fail("pump.envelope", "expected 'self_convolution' or 'substitution'");
    }
    pump.finish();
    validated("pump", [&] { cfg.pump.validate(); });
  }

  if (top.has("grid")) {
    Section grid = top.child("grid");
    cfg.grid.points = grid.unsigned_or("points", cfg.grid.points);
    cfg.grid.span_factor = grid.number_or("span_factor", cfg.grid.span_factor);
    grid.finish();
    if (cfg.grid.points < 64) fail("grid.points", "must be >= 64");
    if (!(cfg.grid.span_factor > 0.0)) fail("grid.span_factor", "must be positive");
  }

  if (top.has("herald_filter")) cfg.herald_filter = parse_filter(top.child("herald_filter"));

  if (top.has("rates")) {
    Section r = top.child("rates");
    RatesConfig rc;
    rc.measured.signal = r.number("signal_hz");
    rc.measured.idler = r.number("idler_hz");
    rc.measured.coincidence = r.number("coincidence_hz");
    rc.detector_efficiency = r.number("detector_efficiency");
    rc.repetition_rate_hz = r.number("rep_rate_hz");
    if (r.has("monte_carlo")) {
      Section mc = r.child("monte_carlo");
      rc.monte_carlo_duration_s = mc.number("duration_s");
      const std::string stats = mc.string_or("statistics", "poissonian");
      if (stats == "poissonian") {
        rc.statistics = PairStatistics::Poissonian;
      } else if (stats == "thermal") {
        rc.statistics = PairStatistics::ThermalSingleMode;
      } else {
        fail("rates.monte_carlo.statistics", "expected 'poissonian' or 'thermal'");
      }
      mc.finish();
      if (!(*rc.monte_carlo_duration_s > 0.0)) fail("rates.monte_carlo.duration_s", "must be positive");
    }
    r.finish();
    validated("rates", [&] { rc.measured.validate(); });
    if (!(rc.detector_efficiency > 0.0 && rc.detector_efficiency <= 1.0)) {
      fail("rates.detector_efficiency", "must lie in (0, 1]");
    }
    if (!(rc.repetition_rate_hz > 0.0)) fail("rates.rep_rate_hz", "must be positive");
    cfg.rates = rc;
  }

  if (top.has("hom")) {
    Section h = top.child("hom");
    cfg.hom.half_range_ps = h.number_or("half_range_ps", cfg.hom.half_range_ps);
    cfg.hom.points = h.unsigned_or("points", cfg.hom.points);
    cfg.hom.baseline_counts = h.number_or("baseline_counts", cfg.hom.baseline_counts);
    cfg.hom.delta_n_offset_b = h.number_or("delta_n_offset_b", 0.0);
    if (h.has("background")) {
      Section b = h.child("background");
      BackgroundConfig bc;
      bc.threefold_rate_a_hz = b.number("threefold_rate_a_hz");
      bc.signal_rate_b_hz = b.number("signal_rate_b_hz");
      bc.threefold_rate_b_hz = b.number("threefold_rate_b_hz");
      bc.signal_rate_a_hz = b.number("signal_rate_a_hz");
      bc.window_s = b.number("window_s");
      bc.duration_s = b.number("duration_s");
      b.finish();
      cfg.hom.background = bc;
    }
    h.finish();
    if (!(cfg.hom.half_range_ps > 0.0)) fail("hom.half_range_ps", "must be positive");
    if (cfg.hom.points < 3) fail("hom.points", "must be >= 3");
    if (!(cfg.hom.baseline_counts > 0.0)) fail("hom.baseline_counts", "must be positive");
  }

  if (top.has("tune")) {
    Section t = top.child("tune");
    cfg.tune.pump_lo_nm = t.number_or("pump_lo_nm", cfg.tune.pump_lo_nm);
    cfg.tune.pump_hi_nm = t.number_or("pump_hi_nm", cfg.tune.pump_hi_nm);
    cfg.tune.steps = t.unsigned_or("steps", cfg.tune.steps);
    cfg.tune.idler_shift_nm = t.number_or("idler_shift_nm", cfg.tune.idler_shift_nm);
    cfg.tune.scan_points = t.unsigned_or("scan_points", cfg.tune.scan_points);
    t.finish();
    if (cfg.tune.steps == 0) fail("tune.steps", "must be >= 1");
    if (cfg.tune.pump_hi_nm < cfg.tune.pump_lo_nm) fail("tune.pump_hi_nm", "must be >= pump_lo_nm");
    if (cfg.tune.scan_points < 2) fail("tune.scan_points", "must be >= 2");
  }

  if (top.has("optimize")) {
    Section o = top.child("optimize");
    cfg.optimize.lower_nm = o.number_or("lower_nm", cfg.optimize.lower_nm);
    cfg.optimize.upper_nm = o.number_or("upper_nm", cfg.optimize.upper_nm);
    cfg.optimize.tolerance_nm = o.number_or("tolerance_nm", cfg.optimize.tolerance_nm);
    if (o.has("filter_widths_nm")) cfg.optimize.filter_widths_nm = o.numbers("filter_widths_nm");
    o.finish();
  }

  top.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sfwm
