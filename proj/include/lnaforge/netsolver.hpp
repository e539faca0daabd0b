#pragma once

#include <complex>
#include <optional>

#include "lnaforge/inductors.hpp"
#include "lnaforge/mosmodel.hpp"
#include "lnaforge/techcard.hpp"
#include "lnaforge/twoport.hpp"

namespace lnaforge {

/// Ideal: only Cgs and gm in M1, lossless L_g / L_S, ideal cascode, y_od = 0.
/// Full: adds inductor series loss, Cgb, Cgd, the finite cascode input
/// admittance (gm2 plus the cascode-node capacitance) and y_od.
enum class Fidelity { Ideal, Full };

/// The synthesized passives. `r_ls` / `r_lg` are the series loss resistances
/// of the source and gate inductors at f0 (zero for ideal elements). A
/// divider capacitor <= 0 means that element is absent.
struct PassiveSet {
  double ls = 0.0;
  double lg = 0.0;
  double cx = 0.0;
  double r_ls = 0.0;
  double r_lg = 0.0;
  InductorSpec ld;
  double c1 = 0.0;
  double cp = 0.0;
  std::optional<InductorGeometry> ls_geometry;
  std::optional<InductorGeometry> lg_geometry;

  double ct(const DevicePoint& dev) const { return cx + dev.cgs; }
};

struct Metrics {
  double gain_db = 0.0;
  double s11_db = 0.0;
  double s22_db = 0.0;
  double nf_db = 0.0;
  double iip3_dbm = 0.0;  // NaN when the device model has no g3
  double gm_eff = 0.0;
  double s11_band_db = 0.0;  // worst of band_lo, f0, band_hi
  double s22_band_db = 0.0;
};

struct CascodeOutput {
  std::complex<double> y_od;
  double g_o_prime = 0.0;
};

struct SParams {
  double s11_db = 0.0;
  double s22_db = 0.0;
};

inline constexpr double kReflectionFloorDb = -100.0;
inline constexpr double kIip3ClampDbm = 30.0;

/// Chain matrix from the source terminals to the cascode output node.
twoport::Chain<double> input_chain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                                   const TechnologyCard& tech);
/// Chain matrix from the cascode output node (tank) through the divider.
twoport::Chain<double> output_chain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                                    const TechnologyCard& tech);

std::complex<double> input_impedance(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                                     const TechnologyCard& tech);
double effective_gm(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                    const TechnologyCard& tech);
CascodeOutput output_stage(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                           const TechnologyCard& tech);
/// 10 log10(gm_eff^2 Rs / G_o').
double gain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode, const TechnologyCard& tech);
/// 20 log10 |S21| of the complete chain between Rs and RL.
double transducer_gain(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                       const TechnologyCard& tech);
SParams s_parameters(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                     const TechnologyCard& tech);
double noise_figure(const DevicePoint& dev, const PassiveSet& p, double f, Fidelity mode,
                    const TechnologyCard& tech);
double iip3(const DevicePoint& dev, const PassiveSet& p, const TechnologyCard& tech);

Metrics evaluate(const DevicePoint& dev, const PassiveSet& p, Fidelity mode, const TechnologyCard& tech);

/// Reflection coefficient in dB, clamped at kReflectionFloorDb.
double reflection_db(std::complex<double> z, double r_ref);

/// Divider (c1 in series, cp across the load) that matches the tank seen
/// through y_od to RL at frequency f. Empty when no positive solution exists.
struct Divider {
  double c1 = 0.0;
  double cp = 0.0;
};
std::optional<Divider> solve_divider(const InductorSpec& ld, std::complex<double> y_od, double f, double rl);

}  // namespace lnaforge
