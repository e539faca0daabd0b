#include "lnaforge/mosmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lnaforge/error.hpp"

namespace lnaforge {

namespace allregion {

namespace {
// s - 1 without cancellation at small ic.
double s_minus_one(double ic, double s) { return 4.0 * ic / (s + 1.0); }
}  // namespace

double overdrive(double ic, double theta) {
  const double s = std::sqrt(1.0 + 4.0 * ic);
  return s - 2.0 + std::log(s_minus_one(ic, s)) + theta * ic;
}

double inversion_coefficient(double v, double theta) {
  // Newton in u = ln(ic); v(ic) is strictly increasing so this is well posed.
  double u = v > 0.0 ? 2.0 * std::log(std::max(v, 1e-3)) : v;
  for (int i = 0; i < 200; ++i) {
    const double ic = std::exp(u);
    const double r = overdrive(ic, theta) - v;
    const double dv_du = ic / slope(ic, theta).h;
    double step = r / dv_du;
    if (step > 2.0) step = 2.0;
    if (step < -2.0) step = -2.0;
    u -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return std::exp(u);
}

Slope slope(double ic, double theta) {
  const double s = std::sqrt(1.0 + 4.0 * ic);
  const double sm1 = s_minus_one(ic, s);
  const double h = 1.0 / (2.0 / sm1 + theta);
  const double u = 1.0 / (s * sm1 * sm1);
  const double du = (2.0 / s) * (-1.0 / (s * s * sm1 * sm1) - 2.0 / (s * sm1 * sm1 * sm1));
  const double dh = 4.0 * h * h * u;
  const double d2h = 8.0 * h * dh * u + 4.0 * h * h * du;
  return {h, dh, d2h};
}

double gm_over_id(double ic, double n_slope, double theta) {
  return slope(ic, theta).h / (ic * n_slope * kThermalVoltage);
}

}  // namespace allregion

double drain_current(double vgt, double i_spec, const TechnologyCard& tech) {
  const double v = vgt / (tech.n_slope * kThermalVoltage);
  return i_spec * allregion::inversion_coefficient(v, tech.mob_theta);
}

namespace {

double gm_of(double w, double l_ch, double id, const TechnologyCard& tech, DeviceMode mode) {
  if (mode == DeviceMode::Simplified) return tech.k_gm * std::sqrt(id * w);
  const double i_spec = tech.i0_spec * w / l_ch;
  const double ic = id / i_spec;
  return i_spec * allregion::slope(ic, tech.mob_theta).h / (tech.n_slope * kThermalVoltage);
}

}  // namespace

DevicePoint device_point(double w1, double l_ch, double id, const TechnologyCard& tech, DeviceMode mode) {
  if (!(w1 > 0.0)) throw Error(ErrorCode::NonPositiveInput, "w1", "NonPositiveInput: w1 must be > 0");
  if (!(l_ch > 0.0)) throw Error(ErrorCode::NonPositiveInput, "l_ch", "NonPositiveInput: l_ch must be > 0");
  if (!(id > 0.0)) throw Error(ErrorCode::NonPositiveInput, "id", "NonPositiveInput: id must be > 0");

  DevicePoint p;
  p.mode = mode;
  p.w1 = w1;
  p.l_ch = l_ch;
  p.id = id;
  p.i_spec = tech.i0_spec * w1 / l_ch;
  p.ic = id / p.i_spec;
  p.gm = gm_of(w1, l_ch, id, tech, mode);
  p.cgs = tech.k_cgs * w1 * l_ch;
  p.cgd = tech.cgd_frac * p.cgs;
  p.cgb = tech.cgb_frac * p.cgs;
  p.ft = p.gm / (2.0 * std::numbers::pi * (p.cgs + p.cgd + p.cgb));

  const double w2 = 0.5 * w1;
  p.gm2 = gm_of(w2, l_ch, id, tech, mode);
  p.cgs2 = tech.k_cgs * w2 * l_ch;
  p.cgd2 = tech.cgd_frac * p.cgs2;
  return p;
}

GmDerivatives gm_derivatives(const DevicePoint& point, const TechnologyCard& tech) {
  if (point.mode != DeviceMode::AllRegion)
    throw Error(ErrorCode::ModeUnsupported, "mode", "ModeUnsupported: gm derivatives need the all-region model");
  const double a = 1.0 / (tech.n_slope * kThermalVoltage);
  const auto [h, dh, d2h] = allregion::slope(point.ic, tech.mob_theta);
  GmDerivatives g;
  g.g1 = point.i_spec * a * h;
  g.g2 = point.i_spec * a * a * h * dh;
  g.g3 = point.i_spec * a * a * a * h * (h * d2h + dh * dh);
  return g;
}

}  // namespace lnaforge
