#include <doctest.h>

#include <cmath>
#include <random>

#include "paper_setup.hpp"
#include "sfwm/dispersion.hpp"
#include "sfwm/error.hpp"

using namespace sfwm;

namespace {

BirefringentFiber silica(double dn = 4e-4) {
  BirefringentFiber f;
  f.delta_n = dn;
  f.length_m = 0.09;
  return f;
}

// Independent three-term evaluation written out term by term.
double silica_index_by_hand(double l) {
  const double l2 = l * l;
  const double n2 = 1.0 + 0.6961663 * l2 / (l2 - 0.0684043 * 0.0684043) +
                    0.4079426 * l2 / (l2 - 0.1162414 * 0.1162414) +
                    0.8974794 * l2 / (l2 - 9.896161 * 9.896161);
  return std::sqrt(n2);
}

double central_difference(const BirefringentFiber& f, double l, double h) {
  return (refractive_index(f, Axis::Fast, l + h) - refractive_index(f, Axis::Fast, l - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("fused silica index at the pump wavelength") {
  const auto f = silica();
  const double n = refractive_index(f, Axis::Fast, 0.715);
  CHECK(n == doctest::Approx(silica_index_by_hand(0.715)).epsilon(1e-14));
  CHECK(n == doctest::Approx(1.454959).epsilon(1e-6));
  // coarse anchor for typical silica near 0.7 um
  CHECK(std::abs(n - 1.4545) < 1e-3);
}

TEST_CASE("slow axis adds delta_n exactly") {
  const auto f = silica(3.7e-4);
  for (double l : {0.3, 0.618, 0.715, 0.848, 1.55}) {
    CHECK(refractive_index(f, Axis::Slow, l) - refractive_index(f, Axis::Fast, l) ==
          doctest::Approx(3.7e-4).epsilon(1e-9));
    CHECK(group_index(f, Axis::Slow, l) - group_index(f, Axis::Fast, l) ==
          doctest::Approx(3.7e-4).epsilon(1e-9));
  }
}

TEST_CASE("out of window wavelengths are rejected") {
  const auto f = silica();
  CHECK_THROWS_AS(refractive_index(f, Axis::Fast, 3.0), Error);
  try {
    refractive_index(f, Axis::Fast, 3.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfDispersionWindow);
  }
  CHECK_THROWS_AS(group_velocity(f, Axis::Fast, 0.2), Error);
  CHECK_THROWS_AS(wavenumber(f, Axis::Fast, omega_from_wavelength_nm(2500.0)), Error);
}

TEST_CASE("wavenumber is consistent with the index and increasing") {
  const auto f = silica();
  const double w = omega_from_wavelength_nm(715.0);
  const double k = wavenumber(f, Axis::Fast, w);
  CHECK(k * kSpeedOfLight / w == doctest::Approx(refractive_index(f, Axis::Fast, 0.715)).epsilon(1e-12));
  CHECK(wavenumber(f, Axis::Slow, w) - k == doctest::Approx(f.delta_n * w / kSpeedOfLight).epsilon(1e-9));

  const double w_lo = omega_from_wavelength_nm(1900.0);
  const double w_hi = omega_from_wavelength_nm(300.0);
  double prev = wavenumber(f, Axis::Fast, w_lo);
  for (int i = 1; i < 100; ++i) {
    const double wi = w_lo + (w_hi - w_lo) * i / 99.0;
    const double ki = wavenumber(f, Axis::Fast, wi);
    CHECK(ki > prev);
    prev = ki;
  }
}

TEST_CASE("group index from the analytic derivative matches finite differences") {
  const auto f = silica();
  const double h = 1e-5;
  const double ng_fd = refractive_index(f, Axis::Fast, 0.715) - 0.715 * central_difference(f, 0.715, h);
  CHECK(group_index(f, Axis::Fast, 0.715) == doctest::Approx(ng_fd).epsilon(1e-8));
  CHECK(group_index(f, Axis::Fast, 0.715) == doctest::Approx(1.470492).epsilon(1e-6));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pick(0.3, 1.9);
  for (int i = 0; i < 20; ++i) {
    const double l = pick(rng);
    const double analytic = sellmeier_index_derivative(f.base, l);
    const double numeric = central_difference(f, l, 1e-5);
    CHECK(analytic == doctest::Approx(numeric).epsilon(1e-8));
  }
}

TEST_CASE("silica shows normal dispersion across the visible and near infrared") {
  const auto f = silica();
  for (double l = 0.4; l <= 1.0; l += 0.01) {
    CHECK(sellmeier_index_derivative(f.base, l) < 0.0);
    CHECK(refractive_index(f, Axis::Fast, l) > 1.0);
  }
}

TEST_CASE("Sellmeier validation") {
  SellmeierModel m = fused_silica();
  CHECK_NOTHROW(m.validate());
  m.b[1] = -0.1;
  CHECK_THROWS_AS(m.validate(), Error);
  m = fused_silica();
  m.window_max_um = 10.0;  // pole at 9.9 um
  CHECK_THROWS_AS(m.validate(), Error);

  auto f = silica(0.0);
  CHECK_THROWS_AS(f.validate(), Error);
  f = silica(2e-2);
  CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("GVM classification") {
  using namespace sfwm::testing;
  const auto fiber = paper_fiber();
  const auto c = gvm_classify(fiber, 0.715, conserve_signal_nm(715.0, 848.0) * 1e-3, 0.848);
  CHECK(c.regime == GvmRegime::PumpBetween);
  CHECK_FALSE(c.degenerate);
  CHECK(c.v_signal < c.v_pump);
  CHECK(c.v_pump < c.v_idler);

  SUBCASE("degenerate") {
    const auto d = gvm_classify(silica(0.0), 0.715, 0.715, 0.715);
    CHECK(d.regime == GvmRegime::Outside);
    CHECK(d.degenerate);
  }

  SUBCASE("pump slower than both") {
    // From a group-index scan: n_g falls monotonically from 0.45 um to 1.0 um,
    // so a blue pump is slower than red signal and idler.
    const auto f = silica(1e-4);
    CHECK(group_index(f, Axis::Slow, 0.45) > group_index(f, Axis::Fast, 0.70));
    CHECK(group_index(f, Axis::Slow, 0.45) > group_index(f, Axis::Fast, 0.90));
    const auto o = gvm_classify(f, 0.45, 0.70, 0.90);
    CHECK(o.regime == GvmRegime::Outside);
    CHECK_FALSE(o.degenerate);
  }

  SUBCASE("pump matching one arm") {
    const auto f = silica(0.0);
    CHECK(gvm_classify(f, 0.70, 0.70, 0.90).regime == GvmRegime::PumpMatchesSignal);
    CHECK(gvm_classify(f, 0.90, 0.70, 0.90).regime == GvmRegime::PumpMatchesIdler);
  }
}
