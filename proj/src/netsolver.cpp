#include "lnaforge/netsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lnaforge {

namespace {

using cd = std::complex<double>;
using Chain = twoport::Chain<double>;
constexpr cd kJ{0.0, 1.0};

double omega(double f) { return 2.0 * std::numbers::pi * f; }

// M1 with its source degeneration folded in: ports are gate-ground and
// drain-ground. C_T = Cx + Cgs sits between gate and source.
Chain common_source_stage(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode) {
  const double w = omega(f);
  const cd y_t = kJ * w * p.ct(dev);
  const cd z_s = kJ * w * p.ls + (mode == Fidelity::Full ? p.r_ls : 0.0);
  const cd den = z_s * (y_t + dev.gm) + 1.0;

  twoport::Admittance<double> y;
  y << y_t / den, 0.0, dev.gm / den, 0.0;
  if (mode == Fidelity::Full) {
    const cd y_gd = kJ * w * dev.cgd;
    y(0, 0) += y_gd;
    y(0, 1) -= y_gd;
    y(1, 0) -= y_gd;
    y(1, 1) += y_gd;
  }
  return twoport::from_admittance<double>(y);
}

// Common-gate M2. Ideal mode is a unity current buffer holding its source at
// AC ground.
Chain cascode_stage(const DevicePoint& dev, double f, Fidelity mode, const TechnologyCard& tech) {
  Chain m;
  if (mode == Fidelity::Ideal) {
    m << 0.0, 0.0, 0.0, 1.0;
    return m;
  }
  const cd y_in = dev.gm2 + kJ * omega(f) * tech.cas_node_frac * dev.cgs2;
  m << 0.0, 1.0 / dev.gm2, 0.0, y_in / dev.gm2;
  return m;
}

cd cascode_output_admittance(const DevicePoint& dev, double f, Fidelity mode, const TechnologyCard& tech) {
  if (mode == Fidelity::Ideal) return 0.0;
  return tech.g_od + kJ * omega(f) * dev.cgd2;
}

cd tank_admittance(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                   const TechnologyCard& tech) {
  return 1.0 / p.ld.r_parallel + 1.0 / (kJ * omega(f) * p.ld.L) + cascode_output_admittance(dev, f, mode, tech);
}

}  // namespace

Chain input_chain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                  const TechnologyCard& tech) {
  const double w = omega(f);
  Chain m = twoport::series<double>(kJ * w * p.lg + (mode == Fidelity::Full ? p.r_lg : 0.0));
  if (mode == Fidelity::Full) m = m * twoport::shunt<double>(kJ * w * dev.cgb);
  m = m * common_source_stage(dev, p, f, mode);
  m = m * cascode_stage(dev, f, mode, tech);
  return m;
}

Chain output_chain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                   const TechnologyCard& tech) {
  const double w = omega(f);
  Chain m = twoport::shunt<double>(tank_admittance(dev, p, f, mode, tech));
  if (p.c1 > 0.0) m = m * twoport::series<double>(1.0 / (kJ * w * p.c1));
  if (p.cp > 0.0) m = m * twoport::shunt<double>(kJ * w * p.cp);
  return m;
}

cd input_impedance(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                   const TechnologyCard& tech) {
  const Chain m = input_chain(dev, p, f, mode, tech) * output_chain(dev, p, f, mode, tech);
  return twoport::input_impedance<double>(m, tech.rl);
}

double effective_gm(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                    const TechnologyCard& tech) {
  // Short-circuit output current: V2 = 0 gives V1 = B I2 and I1 = D I2.
  const Chain m = input_chain(dev, p, f, mode, tech);
  return 1.0 / std::abs(m(0, 1) + tech.rs * m(1, 1));
}

CascodeOutput output_stage(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                           const TechnologyCard& tech) {
  CascodeOutput out;
  out.y_od = cascode_output_admittance(dev, f, mode, tech);
  out.g_o_prime = out.y_od.real() + 1.0 / p.ld.r_parallel;
  return out;
}

double gain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode, const TechnologyCard& tech) {
  const double gm_eff = effective_gm(dev, p, f, mode, tech);
  const double g_o = output_stage(dev, p, f, mode, tech).g_o_prime;
  return 10.0 * std::log10(gm_eff * gm_eff * tech.rs / g_o);
}

double transducer_gain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                       const TechnologyCard& tech) {
  const Chain m = input_chain(dev, p, f, mode, tech) * output_chain(dev, p, f, mode, tech);
  const auto s = twoport::to_s<double>(m, tech.rs, tech.rl);
  return 20.0 * std::log10(std::abs(s(1, 0)));
}

double reflection_db(cd z, double r_ref) {
  const double mag = std::abs((z - r_ref) / (z + r_ref));
  if (mag <= 0.0) return kReflectionFloorDb;
  return std::max(20.0 * std::log10(mag), kReflectionFloorDb);
}

SParams s_parameters(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                     const TechnologyCard& tech) {
  const Chain m = input_chain(dev, p, f, mode, tech) * output_chain(dev, p, f, mode, tech);
  const auto s = twoport::to_s<double>(m, tech.rs, tech.rl);
  auto to_db = [](cd g) {
    const double mag = std::abs(g);
    return mag > 0.0 ? std::max(20.0 * std::log10(mag), kReflectionFloorDb) : kReflectionFloorDb;
  };
  return {to_db(s(0, 0)), to_db(s(1, 1))};
}

double noise_figure(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                    const TechnologyCard& tech) {
  const double r_loss = mode == Fidelity::Full ? p.r_lg + p.r_ls : 0.0;
  const double ratio = f / dev.ft;
  const double factor =
      1.0 + r_loss / tech.rs + (tech.gamma_noise / tech.alpha_noise) * dev.gm * tech.rs * ratio * ratio;
  return 10.0 * std::log10(factor);
}

double iip3(const DevicePoint& dev, const PassiveSet& p, const TechnologyCard& tech) {
  const GmDerivatives g = gm_derivatives(dev, tech);
  const double feedback = 1.0 + g.g1 * tech.omega0() * p.ls;
  const double g3_eff = g.g3 / (feedback * feedback * feedback);
  if (g3_eff == 0.0) return kIip3ClampDbm;
  const double a2 = (4.0 / 3.0) * std::abs(g.g1 / g3_eff);
  const double dbm = 10.0 * std::log10(a2 / (8.0 * tech.rs) / 1e-3);
  return std::min(dbm, kIip3ClampDbm);
}

Metrics evaluate(const DevicePoint& dev, const PassiveSet& p, Fidelity mode, const TechnologyCard& tech) {
  Metrics m;
  const double f0 = tech.f0;
  m.gm_eff = effective_gm(dev, p, f0, mode, tech);
  m.gain_db = gain(dev, p, f0, mode, tech);
  const SParams s0 = s_parameters(dev, p, f0, mode, tech);
  m.s11_db = s0.s11_db;
  m.s22_db = s0.s22_db;
  m.s11_band_db = s0.s11_db;
  m.s22_band_db = s0.s22_db;
  for (const double f : {tech.band_lo, tech.band_hi}) {
    const SParams s = s_parameters(dev, p, f, mode, tech);
    m.s11_band_db = std::max(m.s11_band_db, s.s11_db);
    m.s22_band_db = std::max(m.s22_band_db, s.s22_db);
  }
  m.nf_db = noise_figure(dev, p, f0, mode, tech);
  m.iip3_dbm = dev.mode == DeviceMode::AllRegion ? iip3(dev, p, tech) : std::numeric_limits<double>::quiet_NaN();
  return m;
}

std::optional<Divider> solve_divider(const InductorSpec& ld, cd y_od, double f, double rl) {
  const double w = omega(f);
  const cd z_tank = 1.0 / (1.0 / ld.r_parallel + 1.0 / (kJ * w * ld.L) + y_od);
  if (!(z_tank.real() > 0.0) || z_tank.real() >= rl) return std::nullopt;
  // Looking back from RL: cp || (c1 + z_tank) must equal RL.
  const double q = std::sqrt(rl / z_tank.real() - 1.0);
  const double x_c1 = z_tank.imag() - rl * q / (1.0 + q * q);
  if (!(x_c1 > 0.0)) return std::nullopt;
  return Divider{1.0 / (w * x_c1), q / (w * rl)};
}

}  // namespace lnaforge
