#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "lnaforge/inductors.hpp"
#include "lnaforge/mosmodel.hpp"
#include "lnaforge/netsolver.hpp"
#include "lnaforge/techcard.hpp"

namespace lnaforge {

struct SynthTarget {
  double gain_db = 10.5;
  double gain_tol_db = 0.5;
  double id = 0.4e-3;
  double w1 = 48e-6;
  double l_ch = 120e-9;
  double match_floor_db = -15.0;

  void validate() const;
};

enum class Limit : std::uint8_t { LsMin, LgMax, CxMin, CMax, NoConverge };
inline constexpr Limit kAllLimits[] = {Limit::LsMin, Limit::LgMax, Limit::CxMin, Limit::CMax, Limit::NoConverge};

const char* to_string(Limit limit);
std::optional<Limit> parse_limit(std::string_view name);

/// Bit set over Limit.
class LimitSet {
 public:
  void insert(Limit l) { bits_ |= mask(l); }
  bool contains(Limit l) const { return (bits_ & mask(l)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::vector<Limit> items() const;
  /// "LgMax|CxMin" in declaration order; empty string when empty.
  std::string str() const;
  static LimitSet parse(std::string_view text);

  bool operator==(const LimitSet&) const = default;

 private:
  static std::uint8_t mask(Limit l) { return static_cast<std::uint8_t>(1U << static_cast<unsigned>(l)); }
  std::uint8_t bits_ = 0;
};

/// Signed distance of each passive to its nearest limit; negative means the
/// limit is violated.
struct Margins {
  double ls = 0.0;
  double lg = 0.0;
  double cx = 0.0;
  double c1 = 0.0;
  double cp = 0.0;
};

enum class Status { Feasible, Infeasible };

struct FeasibilityVerdict {
  Status status = Status::Feasible;
  LimitSet binding;
  Margins margin;

  bool feasible() const { return status == Status::Feasible; }
};

/// The inductor library plus the derived views synthesis needs.
struct InductorLibrary {
  std::vector<InductorSpec> members;
  std::vector<InductorSpec> q_envelope;     // max-Q per 0.5 nH bin; drives the continuous loss model
  std::vector<InductorSpec> snap_envelope;  // max-Q per snap bin; discrete choices for L_S and L_g
  InductorSpec drain;

  static InductorLibrary build(const TechnologyCard& tech, const DrainPolicy& policy = {},
                               double snap_bin_width = 0.1e-9);
  static InductorLibrary from_members(std::vector<InductorSpec> members, const DrainPolicy& policy = {},
                                      double snap_bin_width = 0.1e-9);
};

inline constexpr double kEnvelopeBinWidth = 0.5e-9;

struct SynthOptions {
  DeviceMode device_mode = DeviceMode::AllRegion;
  Fidelity fidelity = Fidelity::Full;
  int max_iterations = 200;
  double snap_tolerance = 0.15;
  double cx_clamp = 0.02e-12;
};

struct DesignCandidate {
  SynthTarget target;
  DevicePoint device;
  PassiveSet passives;
  PassiveSet refined;  // continuous values before inductor snapping
  std::optional<Metrics> metrics;
  FeasibilityVerdict verdict;
  int iterations = 0;
};

/// Closed-form passive chain from the simplified equations:
///   G -> Gm -> L_S -> C_T -> C_X, L_g, plus the output divider for L_D.
/// C_X may come out negative; that is reported by classify, not here.
PassiveSet seed_passives(const SynthTarget& target, const TechnologyCard& tech, const DevicePoint& device,
                         const InductorSpec& ld);

struct RefineResult {
  PassiveSet passives;
  bool converged = false;
  int iterations = 0;
};

/// Damped Newton on (L_S, C_X, L_g) driving Re{Zin} - Rs, Im{Zin} and
/// gain - target to zero at f0. Inductor loss follows the Q(L) envelope
/// (empty envelope = lossless).
RefineResult refine_passives(const PassiveSet& seed, const SynthTarget& target, const TechnologyCard& tech,
                             const DevicePoint& device, std::span<const InductorSpec> q_envelope,
                             Fidelity mode = Fidelity::Full, int max_iterations = 200);

FeasibilityVerdict classify(const PassiveSet& passives, const TechnologyCard& tech);

DesignCandidate synthesize(const SynthTarget& target, const TechnologyCard& tech, const InductorLibrary& lib,
                           const SynthOptions& options = {});

/// Linear gain from dB.
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace lnaforge
