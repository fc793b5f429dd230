#include "sfwm/counts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sfwm/error.hpp"

namespace sfwm {

void DetectionChain::validate() const {
  for (double e : {path_efficiency_signal, path_efficiency_idler, detector_efficiency}) {
    if (!(e > 0.0 && e <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "efficiencies must lie in (0, 1]");
    }
  }
}

void CountRates::validate() const {
  for (double r : {signal, idler, coincidence, threefold}) {
    if (!(r >= 0.0)) throw Error(ErrorKind::InvalidArgument, "rates must be non-negative");
  }
  if (coincidence > std::min(signal, idler)) {
    throw Error(ErrorKind::InvalidArgument, "coincidence rate exceeds a singles rate");
  }
}

void SourceRateModel::validate() const {
  if (!(mean_pairs_per_pulse >= 0.0 && mean_pairs_per_pulse <= 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "mean pairs per pulse must lie in [0, 0.5]");
  }
  if (!(repetition_rate_hz > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "repetition rate must be positive");
  }
}

double heralding_efficiency(const CountRates& rates, double detector_efficiency) {
  if (!(rates.signal > 0.0) || !(detector_efficiency > 0.0)) {
    throw Error(ErrorKind::ZeroDenominator, "heralding efficiency needs R_s > 0 and eta_d > 0");
  }
  const double eta = rates.coincidence / (rates.signal * detector_efficiency);
  if (eta > 1.05) {
    std::ostringstream os;
    os << "heralding efficiency " << eta << " exceeds 1.05";
    throw Error(ErrorKind::UnphysicalEfficiency, os.str());
  }
  return eta;
}

double overall_detection_efficiency(const CountRates& rates) {
  if (!(rates.signal > 0.0)) throw Error(ErrorKind::ZeroDenominator, "R_s must be positive");
  return rates.coincidence / rates.signal;
}

double herald_probability_per_pulse(double heralding_eff, double signal_rate_hz,
                                    double repetition_rate_hz) {
  if (!(repetition_rate_hz > 0.0)) {
    throw Error(ErrorKind::ZeroDenominator, "repetition rate must be positive");
  }
  return heralding_eff * signal_rate_hz / repetition_rate_hz;
}

double heralded_g2(double n_herald, double n_herald_idler1, double n_herald_idler2,
                   double n_herald_idler1_idler2) {
  if (!(n_herald_idler1 > 0.0) || !(n_herald_idler2 > 0.0)) {
    throw Error(ErrorKind::ZeroDenominator, "g2 needs non-zero herald-idler coincidences");
  }
  return n_herald_idler1_idler2 * n_herald / (n_herald_idler1 * n_herald_idler2);
}

ClickCounts& ClickCounts::operator+=(const ClickCounts& o) {
  pulses += o.pulses;
  herald += o.herald;
  idler += o.idler;
  idler1 += o.idler1;
  idler2 += o.idler2;
  coincidence += o.coincidence;
  herald_idler1 += o.herald_idler1;
  herald_idler2 += o.herald_idler2;
  threefold += o.threefold;
  return *this;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// E[x^n] for the pair-number distribution.
double generating_function(const SourceRateModel& model, double x) {
  const double mu = model.mean_pairs_per_pulse;
  return model.statistics == PairStatistics::Poissonian ? std::exp(-mu * (1.0 - x))
                                                        : 1.0 / (1.0 + mu * (1.0 - x));
}

// Pair-number probabilities P(n = k | n >= 1) as a cumulative table.
std::vector<double> truncated_cdf(const SourceRateModel& model) {
  const double mu = model.mean_pairs_per_pulse;
  const double p0 = generating_function(model, 0.0);
  std::vector<double> cdf;
  double acc = 0.0;
  double pk = p0;
  for (int k = 1; k < 64; ++k) {
    if (model.statistics == PairStatistics::Poissonian) {
      pk *= mu / k;
    } else {
      pk *= mu / (1.0 + mu);
    }
    acc += pk / (1.0 - p0);
    cdf.push_back(acc);
    if (1.0 - acc < 1e-16) break;
  }
  cdf.back() = 1.0;
  return cdf;
}

ClickCounts simulate_block(const SourceRateModel& model, const DetectionChain& chain,
                           std::uint64_t pulses, std::uint64_t seed,
                           const std::vector<double>& cdf) {
  ClickCounts out;
  out.pulses = pulses;
  const double p_emit = 1.0 - generating_function(model, 0.0);
  if (!(p_emit > 0.0) || pulses == 0) return out;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::geometric_distribution<std::uint64_t> skip(p_emit);
  const double a = chain.signal_total();
  const double b = chain.idler_total();

  std::uint64_t pulse = skip(rng);
  while (pulse < pulses) {
    const double u = uni(rng);
    const auto n = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
    bool herald = false;
    bool i1 = false;
    bool i2 = false;
    for (int k = 0; k < n; ++k) {
      if (uni(rng) < a) herald = true;
      if (uni(rng) < b) {
        if (uni(rng) < 0.5) {
          i1 = true;
        } else {
          i2 = true;
        }
      }
    }
    out.herald += herald;
    out.idler1 += i1;
    out.idler2 += i2;
    out.idler += (i1 || i2);
    out.coincidence += herald && (i1 || i2);
    out.herald_idler1 += herald && i1;
    out.herald_idler2 += herald && i2;
    out.threefold += herald && i1 && i2;
    pulse += 1 + skip(rng);
  }
  return out;
}

}  // namespace

ForwardCountResult forward_count_model(const SourceRateModel& model, const DetectionChain& chain,
                                       double duration_s, std::uint64_t seed) {
  model.validate();
  chain.validate();
  if (!(duration_s > 0.0)) throw Error(ErrorKind::InvalidArgument, "duration must be positive");

  const auto total = static_cast<std::uint64_t>(std::llround(duration_s * model.repetition_rate_hz));
  constexpr std::uint64_t kBlock = 1ULL << 24;

  ForwardCountResult res;
  if (model.mean_pairs_per_pulse > 0.0) {
    const auto cdf = truncated_cdf(model);
    for (std::uint64_t start = 0, block = 0; start < total; start += kBlock, ++block) {
      const std::uint64_t pulses = std::min(kBlock, total - start);
      res.counts += simulate_block(model, chain, pulses, derive_seed(seed, block), cdf);
    }
  }
  res.counts.pulses = total;

  const double t = static_cast<double>(total) / model.repetition_rate_hz;
  res.rates.duration_s = t;
  res.rates.signal = static_cast<double>(res.counts.herald) / t;
  res.rates.idler = static_cast<double>(res.counts.idler) / t;
  res.rates.coincidence = static_cast<double>(res.counts.coincidence) / t;
  res.rates.threefold = static_cast<double>(res.counts.threefold) / t;

  const double mu = model.mean_pairs_per_pulse;
  const double f = model.repetition_rate_hz;
  const double a = chain.signal_total();
  const double b = chain.idler_total();
  res.first_order = {f * mu * a, f * mu * b, f * mu * a * b};
  const double ga = generating_function(model, 1.0 - a);
  const double gb = generating_function(model, 1.0 - b);
  const double gab = generating_function(model, (1.0 - a) * (1.0 - b));
  res.exact = {f * (1.0 - ga), f * (1.0 - gb), f * (1.0 - ga - gb + gab)};

  if (res.counts.herald_idler1 > 0 && res.counts.herald_idler2 > 0) {
    res.heralded_g2 = heralded_g2(static_cast<double>(res.counts.herald),
                                  static_cast<double>(res.counts.herald_idler1),
                                  static_cast<double>(res.counts.herald_idler2),
                                  static_cast<double>(res.counts.threefold));
  } else {
    res.heralded_g2 = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

InvertedSource invert_rates(const CountRates& rates, double detector_efficiency,
                            double repetition_rate_hz) {
  if (!(rates.coincidence > 0.0) || !(repetition_rate_hz > 0.0) || !(detector_efficiency > 0.0)) {
    throw Error(ErrorKind::ZeroDenominator, "rate inversion needs R_c, f_rep and eta_d > 0");
  }
  InvertedSource inv;
  inv.model.mean_pairs_per_pulse = rates.signal * rates.idler / (rates.coincidence * repetition_rate_hz);
  inv.model.repetition_rate_hz = repetition_rate_hz;
  inv.chain.detector_efficiency = detector_efficiency;
  inv.chain.path_efficiency_signal = rates.coincidence / rates.idler / detector_efficiency;
  inv.chain.path_efficiency_idler = rates.coincidence / rates.signal / detector_efficiency;
  inv.model.validate();
  inv.chain.validate();
  return inv;
}

}  // namespace sfwm
