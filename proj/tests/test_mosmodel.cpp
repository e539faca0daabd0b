#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "lnaforge/error.hpp"
#include "lnaforge/mosmodel.hpp"
#include "lnaforge/techcard.hpp"

using namespace lnaforge;

namespace {

// Normalized overdrive of the all-region interpolation, independent of the
// library: v = s - 2 + ln(s - 1) + theta ic with s = sqrt(1 + 4 ic).
double overdrive_oracle(double ic, double theta) {
  const double s = std::sqrt(1.0 + 4.0 * ic);
  return s - 2.0 + std::log(s - 1.0) + theta * ic;
}

// Richardson-extrapolated central differences (error O(h^4)).
double d1(const std::function<double(double)>& f, double x, double h) {
  auto c = [&](double k) { return (f(x + k) - f(x - k)) / (2.0 * k); };
  return (4.0 * c(h / 2.0) - c(h)) / 3.0;
}
double d2(const std::function<double(double)>& f, double x, double h) {
  auto c = [&](double k) { return (f(x + k) - 2.0 * f(x) + f(x - k)) / (k * k); };
  return (4.0 * c(h / 2.0) - c(h)) / 3.0;
}
double d3(const std::function<double(double)>& f, double x, double h) {
  auto c = [&](double k) { return (f(x + 2 * k) - 2.0 * f(x + k) + 2.0 * f(x - k) - f(x - 2 * k)) / (2.0 * k * k * k); };
  return (4.0 * c(h / 2.0) - c(h)) / 3.0;
}

DevicePoint at_ic(double ic, const TechnologyCard& t) {
  // 10 um / 120 nm, current chosen to land on the requested inversion level.
  const double w = 10e-6, l = 120e-9;
  return device_point(w, l, ic * t.i0_spec * w / l, t);
}

}  // namespace

TEST_CASE("simplified mode follows the square-root law exactly") {
  TechnologyCard t = default_card();
  t.k_gm = 1.0;
  const DevicePoint p = device_point(0.1, 1.0, 0.4, t, DeviceMode::Simplified);
  CHECK(p.gm == doctest::Approx(0.2).epsilon(1e-15));

  const TechnologyCard d = default_card();
  for (const double id : {0.1e-3, 0.4e-3, 1e-3})
    for (const double w : {16e-6, 48e-6, 104e-6}) {
      const DevicePoint q = device_point(w, 120e-9, id, d, DeviceMode::Simplified);
      CHECK(q.gm == d.k_gm * std::sqrt(id * w));
      CHECK(q.cgs == d.k_cgs * w * 120e-9);
      CHECK(q.cgd == d.cgd_frac * q.cgs);
      CHECK(q.cgb == d.cgb_frac * q.cgs);
      CHECK(q.gm2 == d.k_gm * std::sqrt(id * w / 2.0));
    }
}

TEST_CASE("derived device fields are consistent") {
  const TechnologyCard t = default_card();
  for (const auto mode : {DeviceMode::Simplified, DeviceMode::AllRegion}) {
    const DevicePoint p = device_point(32e-6, 120e-9, 0.4e-3, t, mode);
    CHECK(p.gm > 0.0);
    CHECK(p.cgs > 0.0);
    CHECK(p.ft == doctest::Approx(p.gm / (2.0 * 3.141592653589793 * (p.cgs + p.cgd + p.cgb))).epsilon(1e-14));
    const DevicePoint half = device_point(16e-6, 120e-9, 0.4e-3, t, mode);
    CHECK(p.gm2 == doctest::Approx(half.gm).epsilon(1e-14));
    CHECK(p.cgs2 == doctest::Approx(half.cgs).epsilon(1e-14));
  }
}

TEST_CASE("narrow devices vanish smoothly") {
  const TechnologyCard t = default_card();
  for (const auto mode : {DeviceMode::Simplified, DeviceMode::AllRegion}) {
    const DevicePoint p = device_point(1e-12, 120e-9, 0.4e-3, t, mode);
    CHECK(p.cgs < 1e-20);
    CHECK(p.gm < 1e-4);
  }
}

TEST_CASE("non-positive inputs are rejected") {
  const TechnologyCard t = default_card();
  CHECK_THROWS_AS(device_point(0.0, 120e-9, 1e-3, t), Error);
  CHECK_THROWS_AS(device_point(1e-6, -1.0, 1e-3, t), Error);
  CHECK_THROWS_AS(device_point(1e-6, 120e-9, 0.0, t), Error);
}

TEST_CASE("gm grows with current and width; fT grows as length shrinks") {
  const TechnologyCard t = default_card();
  for (const auto mode : {DeviceMode::Simplified, DeviceMode::AllRegion}) {
    double prev = 0.0;
    for (double id = 0.1e-3; id <= 2e-3; id += 0.1e-3) {
      const double gm = device_point(32e-6, 120e-9, id, t, mode).gm;
      CHECK(gm > prev);
      prev = gm;
    }
    prev = 0.0;
    for (double w = 4e-6; w <= 200e-6; w += 4e-6) {
      const double gm = device_point(w, 120e-9, 0.4e-3, t, mode).gm;
      CHECK(gm > prev);
      prev = gm;
    }
    CHECK(device_point(32e-6, 120e-9, 0.4e-3, t, mode).ft > device_point(32e-6, 240e-9, 0.4e-3, t, mode).ft);
  }
}

TEST_CASE("default card lands in the intended transconductance range") {
  const TechnologyCard t = default_card();
  const double simplified = device_point(32e-6, 120e-9, 0.4e-3, t, DeviceMode::Simplified).gm;
  CHECK(simplified >= 5e-3);
  CHECK(simplified <= 10e-3);
  const double all_region = device_point(32e-6, 120e-9, 0.4e-3, t).gm;
  CHECK(all_region > 4e-3);
  CHECK(all_region < 10e-3);
}

TEST_CASE("strong inversion agrees with the square-root law") {
  TechnologyCard t = default_card();
  t.mob_theta = 0.0;
  const double l = 120e-9;
  // The square-root law's constant is the strong-inversion limit of the
  // all-region model.
  t.k_gm = std::sqrt(t.i0_spec / l) / (t.n_slope * kThermalVoltage);
  const double w = 10e-6;
  const double id = 100.0 * t.i0_spec * w / l;
  const DevicePoint ar = device_point(w, l, id, t);
  const DevicePoint sq = device_point(w, l, id, t, DeviceMode::Simplified);
  CHECK(ar.ic == doctest::Approx(100.0));
  CHECK(std::abs(ar.gm / sq.gm - 1.0) < 0.05);
}

TEST_CASE("overdrive inverse") {
  for (const double theta : {0.0, 0.1, 0.2})
    for (double ic = 1e-3; ic < 1e3; ic *= 1.7) {
      const double v = overdrive_oracle(ic, theta);
      CHECK(allregion::overdrive(ic, theta) == doctest::Approx(v).epsilon(1e-12));
      CHECK(allregion::inversion_coefficient(v, theta) == doctest::Approx(ic).epsilon(1e-10));
    }
}

TEST_CASE("analytic derivatives match finite differences of the drain current") {
  for (const double theta : {0.0, 0.1}) {
    TechnologyCard t = default_card();
    t.mob_theta = theta;
    const double nut = t.n_slope * kThermalVoltage;
    for (const double ic : {0.01, 0.05, 0.2, 0.5, 1.0, 8.0, 20.0, 50.0, 100.0}) {
      const DevicePoint p = at_ic(ic, t);
      const GmDerivatives g = gm_derivatives(p, t);
      const auto current = [&](double vgt) { return drain_current(vgt, p.i_spec, t); };
      const double vgt = overdrive_oracle(ic, theta) * nut;
      const double h = 0.05 * nut;
      CAPTURE(theta);
      CAPTURE(ic);
      CHECK(current(vgt) == doctest::Approx(p.id).epsilon(1e-10));
      CHECK(g.g1 == doctest::Approx(p.gm).epsilon(1e-6));
      CHECK(std::abs(d1(current, vgt, h) / g.g1 - 1.0) < 1e-4);
      CHECK(std::abs(d2(current, vgt, h) / g.g2 - 1.0) < 1e-4);
      CHECK(std::abs(d3(current, vgt, h) / g.g3 - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("g3 sign: positive in weak inversion, negative in strong, one crossing") {
  const TechnologyCard t = default_card();
  CHECK(gm_derivatives(at_ic(0.01, t), t).g3 > 0.0);
  CHECK(gm_derivatives(at_ic(50.0, t), t).g3 < 0.0);

  for (const double theta : {0.05, 0.1, 0.2}) {
    TechnologyCard c = t;
    c.mob_theta = theta;
    int changes = 0;
    double prev = gm_derivatives(at_ic(0.01, c), c).g3;
    for (int k = 1; k <= 2000; ++k) {
      const double ic = 0.01 * std::pow(1e4, k / 2000.0);
      const double g3 = gm_derivatives(at_ic(ic, c), c).g3;
      if ((g3 > 0.0) != (prev > 0.0)) ++changes;
      prev = g3;
    }
    CAPTURE(theta);
    CHECK(changes == 1);
  }
}

TEST_CASE("derivatives need the all-region model") {
  const TechnologyCard t = default_card();
  const DevicePoint p = device_point(32e-6, 120e-9, 0.4e-3, t, DeviceMode::Simplified);
  try {
    gm_derivatives(p, t);
    FAIL("expected ModeUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModeUnsupported);
  }
}
