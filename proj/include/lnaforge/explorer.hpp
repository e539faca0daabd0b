#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lnaforge/synth.hpp"
#include "lnaforge/techcard.hpp"

namespace lnaforge {

inline constexpr const char* kEngineVersion = "lnaforge 0.1.0";

enum class SweepKind { WxId, GainxW };

const char* to_string(SweepKind kind);
std::optional<SweepKind> parse_sweep_kind(std::string_view name);

struct SweepPlan {
  SweepKind kind = SweepKind::WxId;
  std::vector<double> w1_list;
  std::vector<double> id_list;
  std::vector<double> gain_list;
  double l_ch = 120e-9;
  double gain_tol_db = 0.5;
  double match_floor_db = -15.0;

  std::size_t size() const { return w1_list.size() * id_list.size() * gain_list.size(); }
  void validate() const;

  /// Grids used in the reference exploration. Widths scale with channel
  /// length (16-104 um at 120 nm, 32-208 um at 240 nm).
  static SweepPlan defaults(SweepKind kind, double l_ch = 120e-9);

  bool operator==(const SweepPlan&) const = default;
};

/// `lo, lo+step, ... <= hi` with the end point kept despite rounding.
std::vector<double> linear_grid(double lo, double hi, double step);

/// Everything beyond the CSV columns. Only JSON carries it.
struct RecordDetail {
  double ls_refined = 0.0;
  double lg_refined = 0.0;
  double cx_refined = 0.0;
  double r_ls = 0.0;
  double r_lg = 0.0;
  double gm = 0.0;
  double cgs = 0.0;
  double ic = 0.0;
  double ft = 0.0;
  std::optional<double> s11_band_db;
  std::optional<double> s22_band_db;
  std::optional<double> gm_eff;
  int iterations = 0;

  bool operator==(const RecordDetail&) const = default;
};

/// One grid point, flattened to the export schema.
struct SweepRecord {
  double l_ch = 0.0;
  double w1 = 0.0;
  double id = 0.0;
  double gain_target = 0.0;
  double ls = 0.0;
  double lg = 0.0;
  double cx = 0.0;
  double ld = 0.0;
  double qd = 0.0;
  double c1 = 0.0;
  double cp = 0.0;
  std::optional<double> gain_db;
  std::optional<double> s11_db;
  std::optional<double> s22_db;
  std::optional<double> nf_db;
  std::optional<double> iip3_dbm;
  Status status = Status::Infeasible;
  LimitSet binding;
  std::optional<RecordDetail> detail;

  bool feasible() const { return status == Status::Feasible; }
  bool operator==(const SweepRecord&) const = default;
};

SweepRecord make_record(const DesignCandidate& c);

struct SweepResult {
  std::optional<SweepPlan> plan;
  std::string tech_hash;
  std::string engine_version = kEngineVersion;
  std::vector<SweepRecord> records;

  std::size_t feasible_count() const;
  bool operator==(const SweepResult&) const = default;
};

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// LNA_FORGE_THREADS environment variable when it is set to a positive value.
unsigned resolve_threads(unsigned requested = 0);

/// Evaluates every grid point. Records come back ordered gain-major, then id,
/// then w1, whatever the number of workers.
SweepResult run_sweep(const SweepPlan& plan, const TechnologyCard& tech, const InductorLibrary& lib,
                      unsigned threads = 0, const SynthOptions& options = {});

struct SpecFilter {
  double min_gain_db = -std::numeric_limits<double>::infinity();
  double max_nf_db = std::numeric_limits<double>::infinity();
  double min_iip3_dbm = -std::numeric_limits<double>::infinity();
  double match_ceiling_db = std::numeric_limits<double>::infinity();

  void validate() const;
  bool accepts(const SweepRecord& r) const;

  static SpecFilter permissive() { return {}; }
  /// 802.15.4 receiver front end: G >= 10 dB, NF < 3 dB, IIP3 > -4 dBm,
  /// |S11|, |S22| below -10 dB.
  static SpecFilter zigbee();
};

SweepResult spec_filter(const SweepResult& result, const SpecFilter& filter);

enum class Direction { MaxGm, MinId, MinW1, MaxW1 };
inline constexpr std::array<Direction, 4> kDirections = {Direction::MaxGm, Direction::MinId, Direction::MinW1,
                                                          Direction::MaxW1};
inline constexpr std::array<Limit, 3> kMatrixLimits = {Limit::LsMin, Limit::LgMax, Limit::CxMin};

const char* to_string(Direction d);

/// Expected influence of each passive limit on each design objective.
enum class Effect { None, Primary, Secondary, Both };
const char* to_string(Effect e);
Effect expected_effect(Limit limit, Direction d);

/// Counts, per (limit, direction), of infeasible grid points sitting right at
/// the edge of the feasible region: the neighbouring grid point one step in
/// the direction away from the objective is feasible. For Min W1 that is the
/// next larger width at the same (id, gain); for Max Gm the next lower gain
/// at the same (w1, id); and so on.
struct BindingMatrix {
  std::array<std::array<int, 4>, 3> counts{};

  int& at(Limit limit, Direction d);
  int at(Limit limit, Direction d) const;
  bool operator==(const BindingMatrix&) const = default;
};

BindingMatrix binding_matrix(const SweepResult& result);
BindingMatrix binding_matrix(const std::vector<SweepRecord>& records);

/// Human-readable summary: counts, binding matrix beside the expectation,
/// and how many feasible designs pass `filter`.
std::string report(const SweepResult& result, const SpecFilter& filter = SpecFilter::zigbee(),
                   const std::string& filter_name = "zigbee");

}  // namespace lnaforge
