#include "sfwm/jsa.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sfwm/error.hpp"
#include "sfwm/numeric.hpp"

namespace sfwm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Builds and normalizes without the resolution check; used for the coarse
// preliminary pass of default_grid.
JointSpectralAmplitude build_unchecked(const BirefringentFiber& fiber,
                                       const TwoPhotonEnvelope& envelope,
                                       const SpectralGrid& grid) {
  const std::size_t n = grid.rows();
  const std::size_t m = grid.cols();
  const double omega_p0 = envelope.pump().center_omega();

  std::vector<double> k_signal(n);
  std::vector<double> k_idler(m);
  for (std::size_t r = 0; r < n; ++r) k_signal[r] = wavenumber(fiber, Axis::Fast, grid.signal_axis[r]);
  for (std::size_t c = 0; c < m; ++c) k_idler[c] = wavenumber(fiber, Axis::Fast, grid.idler_axis[c]);

  JointSpectralAmplitude jsa;
  jsa.grid = grid;
  jsa.amplitude.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < n; ++r) {
    const double ws = grid.signal_axis[r];
    for (std::size_t c = 0; c < m; ++c) {
      const double wi = grid.idler_axis[c];
      const double dk =
          2.0 * wavenumber(fiber, Axis::Slow, 0.5 * (ws + wi)) - k_signal[r] - k_idler[c];
      const auto env = envelope((ws + wi - 2.0 * omega_p0) / kTwoPi);
      jsa.amplitude(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          env * phase_matching_from_mismatch(dk, fiber.length_m);
    }
  }
  const double norm2 = jsa.norm_squared();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw Error(ErrorKind::InvalidArgument, "joint spectral amplitude vanishes on the grid");
  }
  jsa.amplitude /= std::sqrt(norm2);
  jsa.norm_weight = 1.0;
  return jsa;
}

std::vector<double> row_marginal(const JointSpectralAmplitude& jsa) {
  const Eigen::VectorXd v = jsa.amplitude.cwiseAbs2().rowwise().sum() * jsa.grid.d_idler();
  return {v.data(), v.data() + v.size()};
}

std::vector<double> col_marginal(const JointSpectralAmplitude& jsa) {
  const Eigen::RowVectorXd v = jsa.amplitude.cwiseAbs2().colwise().sum() * jsa.grid.d_signal();
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd filter_sqrt_transmission(const std::vector<double>& axis,
                                         const SpectralFilter& filter) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(axis.size()));
  for (std::size_t i = 0; i < axis.size(); ++i) {
    t(static_cast<Eigen::Index>(i)) = std::sqrt(filter.transmission(wavelength_nm_from_omega(axis[i])));
  }
  return t;
}

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(buf, 8);
}

template <typename T>
T get(std::istream& is) {
  static_assert(sizeof(T) == 8);
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) {
    throw Error(ErrorKind::InvalidArgument, "truncated JSA binary stream");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

constexpr char kMagic[8] = {'S', 'F', 'W', 'M', 'J', 'S', 'A', '1'};

}  // namespace

SpectralGrid SpectralGrid::centered(double signal_center, double signal_half_span, std::size_t n,
                                    double idler_center, double idler_half_span, std::size_t m) {
  const auto axis = [](double center, double half_span, std::size_t count) {
    std::vector<double> out(count);
    const double step = 2.0 * half_span / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
      out[k] = center - half_span + (static_cast<double>(k) + 0.5) * step;
    }
    return out;
  };
  SpectralGrid g;
  g.signal_axis = axis(signal_center, signal_half_span, n);
  g.idler_axis = axis(idler_center, idler_half_span, m);
  return g;
}

double SpectralGrid::d_signal() const {
  return (signal_axis.back() - signal_axis.front()) / static_cast<double>(signal_axis.size() - 1);
}

double SpectralGrid::d_idler() const {
  return (idler_axis.back() - idler_axis.front()) / static_cast<double>(idler_axis.size() - 1);
}

void SpectralGrid::validate() const {
  for (const auto* axis : {&signal_axis, &idler_axis}) {
    if (axis->size() < 64) throw Error(ErrorKind::InvalidArgument, "grid axes need >= 64 points");
    const double step = ((*axis)[axis->size() - 1] - (*axis)[0]) / static_cast<double>(axis->size() - 1);
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid axis not increasing");
    for (std::size_t k = 1; k < axis->size(); ++k) {
      const double d = (*axis)[k] - (*axis)[k - 1];
      if (!(d > 0.0) || std::abs(d - step) > 1e-6 * step) {
        throw Error(ErrorKind::InvalidArgument, "grid axis not uniformly increasing");
      }
    }
  }
}

double JointSpectralAmplitude::norm_squared() const {
  return amplitude.squaredNorm() * grid.d_signal() * grid.d_idler();
}

SpectralGrid default_grid(const BirefringentFiber& fiber, const TwoPhotonEnvelope& envelope,
                          const GridSpec& spec) {
  if (spec.points < 64) throw Error(ErrorKind::InvalidArgument, "grid needs >= 64 points per axis");
  if (!(spec.span_factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "span factor must be positive");

  const PhaseMatchSolution sol = solve_central(fiber, envelope.pump().center_nm);
  const double ws0 = sol.omega_s();
  const double wi0 = sol.omega_i();

  // Anti-diagonal first-zero scale of the phase-matching sinc and the
  // envelope width along the sum axis set the initial search span.
  const double ng_gap = std::abs(group_index(fiber, Axis::Fast, sol.lambda_s_nm * 1e-3) -
                                 group_index(fiber, Axis::Fast, sol.lambda_i_nm * 1e-3));
  const double pm_scale = kTwoPi * kSpeedOfLight / (std::max(ng_gap, 1e-6) * fiber.length_m);
  const double env_scale = kTwoPi * envelope.fwhm_hz();
  double span_s = 6.0 * std::max(pm_scale, env_scale);
  double span_i = span_s;

  constexpr std::size_t kCoarse = 128;
  double fwhm_s = 0.0;
  double fwhm_i = 0.0;
  for (int iter = 0; iter < 8; ++iter) {
    const SpectralGrid coarse = SpectralGrid::centered(ws0, span_s, kCoarse, wi0, span_i, kCoarse);
    const JointSpectralAmplitude jsa = build_unchecked(fiber, envelope, coarse);
    const auto ms = row_marginal(jsa);
    const auto mi = col_marginal(jsa);
    const auto fs = fwhm(coarse.signal_axis, ms);
    const auto fi = fwhm(coarse.idler_axis, mi);
    if (!fs || !fi) {
      span_s *= 2.0;
      span_i *= 2.0;
      continue;
    }
    fwhm_s = *fs;
    fwhm_i = *fi;
    // Re-measure if the marginal is resolved by too few coarse cells.
    const bool fine_s = fwhm_s > 16.0 * coarse.d_signal();
    const bool fine_i = fwhm_i > 16.0 * coarse.d_idler();
    if (fine_s && fine_i) break;
    span_s = std::min(span_s, 8.0 * fwhm_s);
    span_i = std::min(span_i, 8.0 * fwhm_i);
  }
  if (!(fwhm_s > 0.0) || !(fwhm_i > 0.0)) {
    throw Error(ErrorKind::NoSolution, "could not resolve the marginal spectra for grid sizing");
  }
  return SpectralGrid::centered(ws0, spec.span_factor * fwhm_s, spec.points, wi0,
                                spec.span_factor * fwhm_i, spec.points);
}

JointSpectralAmplitude build_jsa(const BirefringentFiber& fiber, const TwoPhotonEnvelope& envelope,
                                 const SpectralGrid& grid) {
  grid.validate();
  const double cells = kTwoPi * envelope.fwhm_hz() / (grid.d_signal() + grid.d_idler());
  if (cells < 8.0) {
    std::ostringstream os;
    os << "envelope FWHM covers " << cells << " diagonal cells (< 8)";
    throw Error(ErrorKind::GridTooCoarse, os.str());
  }
  return build_unchecked(fiber, envelope, grid);
}

SchmidtDecomposition schmidt(const JointSpectralAmplitude& jsa) {
  const Eigen::MatrixXcd weighted =
      jsa.amplitude * std::sqrt(jsa.grid.d_signal() * jsa.grid.d_idler());
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(weighted);
  if (svd.info() != Eigen::Success) throw Error(ErrorKind::SvdFailure, "SVD did not converge");
  const Eigen::VectorXd s = svd.singularValues();
  const double total = s.squaredNorm();
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw Error(ErrorKind::SvdFailure, "singular values are not finite and positive");
  }

  SchmidtDecomposition out;
  out.probabilities.resize(static_cast<std::size_t>(s.size()));
  double purity = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double p = s(k) * s(k) / total;
    out.probabilities[static_cast<std::size_t>(k)] = p;
    purity += p * p;
  }
  std::sort(out.probabilities.begin(), out.probabilities.end(), std::greater<>());
  out.purity = purity;
  out.schmidt_number = 1.0 / purity;
  return out;
}

void SpectralFilter::validate() const {
  if (!(fwhm_nm > 0.0)) throw Error(ErrorKind::InvalidArgument, "filter FWHM must be positive");
  if (!(peak_transmission > 0.0 && peak_transmission <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "filter peak transmission must lie in (0, 1]");
  }
  if (shape == FilterShape::SuperGaussian && order < 1) {
    throw Error(ErrorKind::InvalidArgument, "super-Gaussian order must be >= 1");
  }
}

double SpectralFilter::transmission(double wavelength_nm) const {
  const double x = 2.0 * std::abs(wavelength_nm - center_nm) / fwhm_nm;
  switch (shape) {
    case FilterShape::Rectangular:
      return x <= 1.0 ? peak_transmission : 0.0;
    case FilterShape::SuperGaussian:
      return peak_transmission * std::exp(-std::numbers::ln2 * std::pow(x, 2.0 * order));
  }
  return 0.0;
}

JointSpectralAmplitude apply_filter(const JointSpectralAmplitude& jsa, Arm arm,
                                    const SpectralFilter& filter) {
  filter.validate();
  JointSpectralAmplitude out = jsa;
  if (arm == Arm::Signal) {
    out.amplitude = filter_sqrt_transmission(jsa.grid.signal_axis, filter).asDiagonal() * jsa.amplitude;
  } else {
    out.amplitude = jsa.amplitude * filter_sqrt_transmission(jsa.grid.idler_axis, filter).asDiagonal();
  }
  const double before = jsa.amplitude.squaredNorm();
  const double retained = before > 0.0 ? out.amplitude.squaredNorm() / before : 0.0;
  if (retained < 1e-6) {
    std::ostringstream os;
    os << "filter at " << filter.center_nm << " nm retains " << retained << " of the amplitude";
    throw Error(ErrorKind::FilterOutsideGrid, os.str());
  }
  out.norm_weight = jsa.norm_weight * retained;
  return out;
}

double HeraldedState::purity() const {
  // Tr(rho^2) = sum |rho_jk|^2 for Hermitian rho
  return rho.cwiseAbs2().sum();
}

HeraldedState HeraldedState::from_pure(std::vector<double> axis, const Eigen::VectorXcd& amplitudes) {
  if (static_cast<std::size_t>(amplitudes.size()) != axis.size()) {
    throw Error(ErrorKind::InvalidArgument, "amplitude length does not match axis");
  }
  const double n2 = amplitudes.squaredNorm();
  if (!(n2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero pure-state amplitude");
  HeraldedState st;
  st.idler_axis = std::move(axis);
  st.rho = amplitudes * amplitudes.adjoint() / n2;
  st.herald_probability = 1.0;
  return st;
}

HeraldedState heralded_density_matrix(const JointSpectralAmplitude& jsa,
                                      const std::optional<SpectralFilter>& herald_filter) {
  const JointSpectralAmplitude filtered =
      herald_filter ? apply_filter(jsa, Arm::Signal, *herald_filter) : jsa;
  const double quad = jsa.grid.d_signal() * jsa.grid.d_idler();

  HeraldedState st;
  st.idler_axis = jsa.grid.idler_axis;
  st.rho = (filtered.amplitude.transpose() * filtered.amplitude.conjugate()) * quad;
  const double trace = st.rho.trace().real();
  const double input_norm = jsa.norm_squared();
  if (!(trace > 0.0) || !(input_norm > 0.0)) {
    throw Error(ErrorKind::FilterOutsideGrid, "heralded state has zero trace");
  }
  st.herald_probability = trace / input_norm * jsa.norm_weight;
  st.rho /= trace;
  const Eigen::MatrixXcd herm = 0.5 * (st.rho + st.rho.adjoint());
  st.rho = herm;
  return st;
}

MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa, Arm arm) {
  MarginalSpectrum out;
  out.omega = arm == Arm::Signal ? jsa.grid.signal_axis : jsa.grid.idler_axis;
  out.intensity = arm == Arm::Signal ? row_marginal(jsa) : col_marginal(jsa);
  out.wavelength_nm.reserve(out.omega.size());
  for (double w : out.omega) out.wavelength_nm.push_back(wavelength_nm_from_omega(w));
  if (const auto c = half_max_crossings(out.omega, out.intensity)) {
    out.fwhm_omega = c->second - c->first;
    out.fwhm_nm = wavelength_nm_from_omega(c->first) - wavelength_nm_from_omega(c->second);
  }
  return out;
}

void write_jsa_csv(const JointSpectralAmplitude& jsa, std::ostream& os) {
  os << "omega_s_rad_per_s,omega_i_rad_per_s,re,im\n";
  os.precision(17);
  for (std::size_t r = 0; r < jsa.grid.rows(); ++r) {
    for (std::size_t c = 0; c < jsa.grid.cols(); ++c) {
      const auto v = jsa.amplitude(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      os << jsa.grid.signal_axis[r] << ',' << jsa.grid.idler_axis[c] << ',' << v.real() << ','
         << v.imag() << '\n';
    }
  }
}

void write_jsa_binary(const JointSpectralAmplitude& jsa, std::ostream& os) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(os, jsa.grid.rows());
  put<std::uint64_t>(os, jsa.grid.cols());
  put<double>(os, jsa.norm_weight);
  for (double w : jsa.grid.signal_axis) put<double>(os, w);
  for (double w : jsa.grid.idler_axis) put<double>(os, w);
  for (Eigen::Index r = 0; r < jsa.amplitude.rows(); ++r) {
    for (Eigen::Index c = 0; c < jsa.amplitude.cols(); ++c) {
      put<double>(os, jsa.amplitude(r, c).real());
      put<double>(os, jsa.amplitude(r, c).imag());
    }
  }
}

JointSpectralAmplitude read_jsa_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw Error(ErrorKind::InvalidArgument, "not a JSA binary dump");
  }
  const auto rows = get<std::uint64_t>(is);
  const auto cols = get<std::uint64_t>(is);
  if (rows == 0 || cols == 0 || rows > (1u << 16) || cols > (1u << 16)) {
    throw Error(ErrorKind::InvalidArgument, "implausible JSA dimensions");
  }
  JointSpectralAmplitude jsa;
  jsa.norm_weight = get<double>(is);
  jsa.grid.signal_axis.resize(rows);
  jsa.grid.idler_axis.resize(cols);
  for (auto& w : jsa.grid.signal_axis) w = get<double>(is);
  for (auto& w : jsa.grid.idler_axis) w = get<double>(is);
  jsa.amplitude.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < jsa.amplitude.rows(); ++r) {
    for (Eigen::Index c = 0; c < jsa.amplitude.cols(); ++c) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      jsa.amplitude(r, c) = {re, im};
    }
  }
  return jsa;
}

}  // namespace sfwm
