#pragma once

#include "lnaforge/techcard.hpp"

namespace lnaforge {

enum class DeviceMode { Simplified, AllRegion };

/// M1 sizing and bias with the derived small-signal quantities. M2 is always
/// sized at half the width of M1 and carries the same current.
struct DevicePoint {
  DeviceMode mode = DeviceMode::AllRegion;
  double w1 = 0.0;
  double l_ch = 0.0;
  double id = 0.0;

  double gm = 0.0;
  double cgs = 0.0;
  double cgd = 0.0;
  double cgb = 0.0;
  double ft = 0.0;
  double ic = 0.0;
  double i_spec = 0.0;  // I0_spec * W / L

  double gm2 = 0.0;
  double cgs2 = 0.0;
  double cgd2 = 0.0;
};

struct GmDerivatives {
  double g1 = 0.0;  // S
  double g2 = 0.0;  // S/V
  double g3 = 0.0;  // S/V^2
};

DevicePoint device_point(double w1, double l_ch, double id, const TechnologyCard& tech,
                         DeviceMode mode = DeviceMode::AllRegion);

/// Throws Error(ModeUnsupported) for simplified-mode points.
GmDerivatives gm_derivatives(const DevicePoint& point, const TechnologyCard& tech);

namespace allregion {

// Normalized drain current ic against normalized overdrive v = (V_G - V_T0)/(n U_T):
//   v(ic) = s - 2 + ln(s - 1) + theta * ic,   s = sqrt(1 + 4 ic).
// theta = 0 is the plain all-region interpolation; theta > 0 adds mobility
// reduction, which is what gives g3 its moderate-inversion zero.

double overdrive(double ic, double theta);
double inversion_coefficient(double v, double theta);

/// d(ic)/dv and its first two derivatives with respect to ic.
struct Slope {
  double h = 0.0;
  double dh = 0.0;
  double d2h = 0.0;
};
Slope slope(double ic, double theta);

/// gm / I_D in 1/V.
double gm_over_id(double ic, double n_slope, double theta);

}  // namespace allregion

/// Drain current of a device against gate overdrive V_G - V_T0 (V).
double drain_current(double vgt, double i_spec, const TechnologyCard& tech);

}  // namespace lnaforge
