#pragma once

#include <iosfwd>
#include <numbers>
#include <string>
#include <string_view>

namespace lnaforge {

/// Inclusive range swept in fixed steps, used for the spiral geometry grid.
struct GridRange {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;

  bool operator==(const GridRange&) const = default;
};

/// Realizability limits of the passive elements plus the spiral geometry
/// grid the inductor library is built from.
struct PassiveLimits {
  double ls_min = 1e-9;   // H
  double lg_max = 18e-9;  // H
  double cx_min = 0.0;    // F
  double c_max = 5e-12;   // F
  GridRange nt{1.0, 8.0, 0.25};
  GridRange od{100e-6, 400e-6, 10e-6};
  GridRange w{4e-6, 16e-6, 2e-6};
  double s = 2e-6;  // m, fixed by the metal stack

  bool operator==(const PassiveLimits&) const = default;
};

/// Every process constant the engine uses. All values are SI base units.
///
/// Device constants are calibration placeholders: the simplified model uses
/// gm = k_gm * sqrt(I_D * W) and Cgs = k_cgs * W * L; the all-region model
/// uses the inversion coefficient IC = I_D / (i0_spec * W / L) with a
/// mobility-reduction term `mob_theta` that shapes the third-order
/// nonlinearity. `cas_node_frac` scales the cascode-node capacitance (Cgs of
/// M2) and `g_od` is the real part of the cascode output admittance.
struct TechnologyCard {
  std::string name = "default-130nm";

  // [general]
  double f0 = 2.45e9;
  double band_lo = 2.4e9;
  double band_hi = 2.5e9;
  double rs = 50.0;
  double rl = 50.0;
  double vdd = 1.2;

  // [device]
  double k_gm = 50.0;
  double k_cgs = 8e-3;
  double n_slope = 1.3;
  double i0_spec = 4.9e-7;
  double mob_theta = 0.1;
  double gamma_noise = 2.0 / 3.0;
  double alpha_noise = 0.8;
  double cgd_frac = 0.05;
  double cgb_frac = 0.05;
  double cas_node_frac = 0.5;
  double g_od = 2e-4;

  // [passives]
  double sheet_res = 5e-3;
  double metal_resistivity = 1.7e-8;
  double sub_loss_k = 0.04;
  double cap_density = 2e-3;

  // [limits]
  PassiveLimits limits;

  double omega0() const { return 2.0 * std::numbers::pi * f0; }

  /// Throws Error(InvalidBand / InconsistentLimits / InvalidValue) naming the
  /// first offending field.
  void validate() const;

  bool operator==(const TechnologyCard&) const = default;
};

/// Thermal voltage at 300 K.
inline constexpr double kThermalVoltage = 0.02585;

TechnologyCard default_card();

TechnologyCard parse_card(std::string_view text);
TechnologyCard load_card(const std::string& path);
std::string serialize_card(const TechnologyCard& card);
void save_card(const TechnologyCard& card, const std::string& path);

/// FNV-1a over the canonical serialization, as 16 hex digits.
std::string card_hash(const TechnologyCard& card);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace lnaforge
