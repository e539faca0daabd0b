#pragma once

#include <span>
#include <vector>

#include "lnaforge/techcard.hpp"

namespace lnaforge {

/// Octagonal spiral layout. `nt` has quarter-turn granularity.
struct InductorGeometry {
  double nt = 0.0;
  double od = 0.0;
  double w = 0.0;
  double s = 0.0;

  double inner_diameter() const { return od - 2.0 * nt * (w + s); }
  double mean_diameter() const { return 0.5 * (od + inner_diameter()); }
  double fill_ratio() const { return (od - inner_diameter()) / (od + inner_diameter()); }
  /// Centre-line trace length: nt turns around an octagon of the mean diameter.
  double trace_length() const;

  /// Throws Error(UnrealizableGeometry) when the spiral cannot be laid out.
  void validate() const;
  bool realizable() const noexcept;

  bool operator==(const InductorGeometry&) const = default;
};

/// A library member evaluated at the card's operating frequency.
/// `r_series` is the ohmic trace resistance; `q_at_f0` also includes the
/// substrate term, so `loss_resistance()` is what a series-R circuit model
/// of the inductor must use.
struct InductorSpec {
  InductorGeometry geometry;
  double L = 0.0;
  double q_at_f0 = 0.0;
  double r_series = 0.0;
  double r_parallel = 0.0;

  double loss_resistance(double omega0) const { return omega0 * L / q_at_f0; }
};

double inductance_of(const InductorGeometry& geom);
double series_resistance(const InductorGeometry& geom, double f, const TechnologyCard& tech);
double q_of(const InductorGeometry& geom, double f, const TechnologyCard& tech);
InductorSpec make_inductor(const InductorGeometry& geom, const TechnologyCard& tech);

/// Densest spiral the library admits. Past this fill ratio the current-sheet
/// expression stops growing with the turn count (the hole has closed up).
inline constexpr double kMaxFillRatio = 0.8;

/// Every realizable point of the card's geometry grid with a fill ratio up to
/// kMaxFillRatio, sorted by inductance. Other grid points are skipped; an
/// empty result throws EmptyGrid.
std::vector<InductorSpec> build_library(const TechnologyCard& tech);

/// Edges lo, lo+width, ... up to the first edge >= hi.
std::vector<double> uniform_bins(double lo, double hi, double width);

/// Highest-Q member per inductance bin (half-open [e_i, e_i+1)), sorted by L.
std::vector<InductorSpec> max_q_envelope(std::span<const InductorSpec> lib, std::span<const double> bins);

/// Lowest-Q member per parallel-resistance bin, sorted by r_parallel.
std::vector<InductorSpec> min_q_envelope(std::span<const InductorSpec> lib, std::span<const double> bins);

enum class DrainPreference { LowestQ, Any };

struct DrainPolicy {
  double r_parallel_target = 2000.0;
  DrainPreference prefer = DrainPreference::LowestQ;
  double r_bin_width = 100.0;
};

/// Member of the lowest-Q envelope whose r_parallel is nearest the target.
/// Ties resolve to the smaller inductance.
InductorSpec select_drain_inductor(std::span<const InductorSpec> lib, const DrainPolicy& policy);

/// Envelope member with minimal |L - target|, ties to the smaller L. Throws
/// Error(LimitViolation) with field "ls_min" or "lg_max" when the target is
/// outside the realizable range.
InductorSpec nearest_inductor(std::span<const InductorSpec> envelope, double l_target,
                              const PassiveLimits& limits);

/// Piecewise-linear Q(L) through an envelope sorted by L, clamped at the ends.
double envelope_q(std::span<const InductorSpec> envelope, double L);

}  // namespace lnaforge
