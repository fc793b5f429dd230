#include <doctest.h>

#include <cmath>

#include "paper_setup.hpp"
#include "sfwm/error.hpp"
#include "sfwm/hom.hpp"

using namespace sfwm;
using namespace sfwm::testing;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an sfwm::Error");
  return ErrorKind::InvalidArgument;
}

std::vector<double> axis(double center, double half_span, std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = center - half_span + (2.0 * half_span) * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  }
  return a;
}

// Pure Gaussian state with intensity rms width sigma.
HeraldedState gaussian(const std::vector<double>& ax, double center, double sigma) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(ax.size()));
  for (std::size_t k = 0; k < ax.size(); ++k) {
    const double x = ax[k] - center;
    v(static_cast<Eigen::Index>(k)) = std::exp(-x * x / (4.0 * sigma * sigma));
  }
  return HeraldedState::from_pure(ax, v);
}

struct PaperStates {
  HeraldedState unfiltered;
  HeraldedState filtered;
  double purity = 0.0;
};

const PaperStates& paper_states() {
  static const PaperStates s = [] {
    const auto fiber = paper_fiber();
    const TwoPhotonEnvelope env(paper_pump());
    const auto jsa = build_jsa(fiber, env, default_grid(fiber, env));
    return PaperStates{heralded_density_matrix(jsa), heralded_density_matrix(jsa, herald_filter(2.0)),
                       schmidt(jsa).purity};
  }();
  return s;
}

}  // namespace

TEST_CASE("overlap of pure Gaussian states") {
  const double w0 = 2.2e15;
  const double sigma = 1e12;
  const auto ax = axis(w0, 20.0 * sigma, 1024);
  const auto a = gaussian(ax, w0, sigma);

  CHECK(hom_overlap(a, a, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coincidence_probability(a, a, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

  for (double delta : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const auto b = gaussian(ax, w0 + delta * sigma, sigma);
    const double exact = std::exp(-delta * delta / 4.0);
    CHECK(std::abs(hom_overlap(a, b, 0.0) - exact) < 1e-4);
  }

  // distinguishable limit
  CHECK(coincidence_probability(a, a, 200.0 / sigma) == doctest::Approx(0.5).epsilon(1e-9));

  // disjoint spectra
  const auto far = gaussian(ax, w0 + 12.0 * sigma, sigma);
  const auto scan = hom_scan(a, far, symmetric_delays(20.0 / sigma, 101));
  CHECK(scan.visibility == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("overlap falls monotonically with detuning") {
  const double w0 = 2.2e15;
  const double sigma = 1e12;
  const auto ax = axis(w0, 20.0 * sigma, 512);
  const auto a = gaussian(ax, w0, sigma);
  double last = 1.0 + 1e-12;
  for (double d = 0.0; d <= 2.4; d += 0.1) {
    const double o = hom_overlap(a, gaussian(ax, w0 + d * sigma, sigma), 0.0);
    CHECK(o <= last);
    last = o;
  }
}

TEST_CASE("identical paper sources") {
  const auto& s = paper_states();
  const auto& st = s.unfiltered;

  CHECK(std::abs(hom_overlap(st, st, 0.0) - st.purity()) < 1e-10);
  CHECK(std::abs(hom_overlap(st, st, 0.0) - s.purity) < 1e-10);
  CHECK(coincidence_probability(st, st, 0.0) == doctest::Approx(0.5 * (1.0 - s.purity)).epsilon(1e-10));

  for (double tau : {0.3e-12, 1e-12, 2.5e-12, 7e-12}) {
    const double o = hom_overlap(st, st, tau);
    CHECK(std::abs(o - hom_overlap(st, st, -tau)) < 1e-8);
    CHECK(o >= 0.0);
    CHECK(o <= 1.0);
  }

  const auto scan = hom_scan(st, st, symmetric_delays(20e-12, 201));
  CHECK(std::abs(scan.coincidence_probability.front() - 0.5) < 1e-3);
  CHECK(std::abs(scan.coincidence_probability.back() - 0.5) < 1e-3);
  CHECK(scan.visibility >= 0.70);
  CHECK(scan.visibility <= 0.85);
  // ideal-plateau visibility equals the purity
  const std::size_t mid = scan.delays_s.size() / 2;
  CHECK(scan.delays_s[mid] == 0.0);
  CHECK(std::abs((1.0 - 2.0 * scan.coincidence_probability[mid]) - s.purity) < 1e-10);

  const auto width = dip_fwhm(scan);
  REQUIRE(width);
  CHECK(*width > 0.5e-12);
  CHECK(*width < 10e-12);

  const auto fscan = hom_scan(s.filtered, s.filtered, symmetric_delays(20e-12, 201));
  CHECK(fscan.visibility > scan.visibility);
}

TEST_CASE("visibility errors and edge cases") {
  const auto& st = paper_states().unfiltered;
  CHECK(kind_of([&] { hom_scan(st, st, symmetric_delays(1e-12, 21)); }) == ErrorKind::PlateauNotReached);

  auto other = st;
  other.idler_axis[3] *= 1.0 + 1e-9;
  CHECK(kind_of([&] { hom_overlap(st, other, 0.0); }) == ErrorKind::GridMismatch);
  auto shorter = HeraldedState::from_pure({1.0, 2.0}, Eigen::VectorXcd::Ones(2));
  CHECK(kind_of([&] { coincidence_probability(st, shorter, 0.0); }) == ErrorKind::GridMismatch);

  const auto d = symmetric_delays(5e-12, 11);
  CHECK(d.size() == 11);
  CHECK(d.front() == -5e-12);
  CHECK(d.back() == 5e-12);
  CHECK(d[5] == 0.0);
}

TEST_CASE("multi-pair background") {
  const auto b = multi_pair_background(2.0, 82600.0, 2.0, 82600.0, 3e-9, 3027.0, 300.0);
  CHECK(b.background_counts == doctest::Approx(2.0 * 2.0 * 82600.0 * 3e-9 * 3027.0));
  CHECK(b.visibility_correction == doctest::Approx(b.background_counts / 300.0));

  CHECK(multi_pair_background(0.0, 1.0, 0.0, 5.0, 1e-9, 1.0, 1.0).background_counts == 0.0);
  CHECK(multi_pair_background(3.0, 0.0, 2.0, 0.0, 1e-9, 1.0, 1.0).background_counts == 0.0);
  CHECK(multi_pair_background(2.0, 0.0, 0.0, 7.0, 1e-9, 1.0, 1.0).background_counts == 0.0);

  const auto b2w = multi_pair_background(2.0, 82600.0, 2.0, 82600.0, 6e-9, 3027.0, 300.0);
  const auto b2t = multi_pair_background(2.0, 82600.0, 2.0, 82600.0, 3e-9, 6054.0, 300.0);
  CHECK(b2w.background_counts == doctest::Approx(2.0 * b.background_counts).epsilon(1e-14));
  CHECK(b2t.background_counts == doctest::Approx(2.0 * b.background_counts).epsilon(1e-14));

  CHECK_THROWS_AS(multi_pair_background(-1.0, 1.0, 1.0, 1.0, 1e-9, 1.0, 1.0), Error);
  CHECK_THROWS_AS(multi_pair_background(1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0), Error);
}

TEST_CASE("synthetic fourfold scans") {
  const double w0 = 2.2e15;
  const double sigma = 1e12;
  const auto ax = axis(w0, 20.0 * sigma, 256);
  const auto a = gaussian(ax, w0, sigma);
  const auto delays = symmetric_delays(20.0 / sigma, 41);

  const auto clean = simulate_fourfold_scan(a, a, delays, 300.0, 0.0, std::nullopt);
  CHECK(clean.expected_counts[20] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(!clean.sampled_counts);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    CHECK(clean.expected_counts[k] == doctest::Approx(300.0 * 2.0 * clean.coincidence_probability[k]));
  }

  const auto s1 = simulate_fourfold_scan(a, a, delays, 300.0, 3.0, 42);
  const auto s2 = simulate_fourfold_scan(a, a, delays, 300.0, 3.0, 42);
  const auto s3 = simulate_fourfold_scan(a, a, delays, 300.0, 3.0, 43);
  REQUIRE(s1.sampled_counts);
  CHECK(*s1.sampled_counts == *s2.sampled_counts);
  CHECK(*s1.sampled_counts != *s3.sampled_counts);
  for (auto c : *s1.sampled_counts) CHECK(c >= 0);
  CHECK(s1.expected_counts[20] == doctest::Approx(3.0));
  CHECK(s1.background_counts == 3.0);

  CHECK_THROWS_AS(simulate_fourfold_scan(a, a, delays, 0.0, 0.0, std::nullopt), Error);
}
