#include "lnaforge/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "lnaforge/error.hpp"

namespace lnaforge {

const char* to_string(SweepKind kind) {
  return kind == SweepKind::WxId ? "wxid" : "gainxw";
}

std::optional<SweepKind> parse_sweep_kind(std::string_view name) {
  if (name == "wxid") return SweepKind::WxId;
  if (name == "gainxw") return SweepKind::GainxW;
  return std::nullopt;
}

namespace {

void require_increasing(const std::vector<double>& v, const char* field) {
  if (v.empty()) throw Error(ErrorCode::EmptyGrid, field, std::string(field) + " is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw Error(ErrorCode::InvalidValue, field, std::string(field) + " has a non-finite entry");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw Error(ErrorCode::InvalidValue, field, std::string(field) + " must be strictly increasing");
  }
}

}  // namespace

void SweepPlan::validate() const {
  require_increasing(w1_list, "w1_list");
  require_increasing(id_list, "id_list");
  require_increasing(gain_list, "gain_list");
  if (w1_list.front() <= 0.0) throw Error(ErrorCode::NonPositiveInput, "w1_list", "widths must be positive");
  if (id_list.front() <= 0.0) throw Error(ErrorCode::NonPositiveInput, "id_list", "currents must be positive");
  if (!(l_ch > 0.0)) throw Error(ErrorCode::NonPositiveInput, "l_ch", "channel length must be positive");
  if (!(gain_tol_db > 0.0)) throw Error(ErrorCode::InvalidValue, "gain_tol", "gain tolerance must be positive");
  if (kind == SweepKind::WxId && gain_list.size() != 1)
    throw Error(ErrorCode::InvalidValue, "gain_list", "a wxid sweep takes exactly one gain target");
  if (kind == SweepKind::GainxW && id_list.size() != 1)
    throw Error(ErrorCode::InvalidValue, "id_list", "a gainxw sweep takes exactly one bias current");
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidValue, "grid", "need step > 0 and hi >= lo");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

SweepPlan SweepPlan::defaults(SweepKind kind, double l_ch) {
  SweepPlan p;
  p.kind = kind;
  p.l_ch = l_ch;
  const double scale = l_ch / 120e-9;
  // Integer nanometres divided by an exact power of ten give the correctly
  // rounded double, so 16 um prints as 1.6e-05 rather than 1.6000000000000003e-05.
  for (double w : linear_grid(16.0, 104.0, 8.0)) p.w1_list.push_back(std::round(w * scale * 1e3) / 1e9);
  if (kind == SweepKind::WxId) {
    for (int k = 3; k <= 7; ++k) p.id_list.push_back(k / 1e4);
    p.gain_list = {10.5};
  } else {
    p.id_list = {0.4e-3};
    p.gain_list = {10.5, 11.0, 12.0, 13.0};
  }
  return p;
}

SweepRecord make_record(const DesignCandidate& c) {
  SweepRecord r;
  r.l_ch = c.target.l_ch;
  r.w1 = c.target.w1;
  r.id = c.target.id;
  r.gain_target = c.target.gain_db;
  r.ls = c.passives.ls;
  r.lg = c.passives.lg;
  r.cx = c.passives.cx;
  r.ld = c.passives.ld.L;
  r.qd = c.passives.ld.q_at_f0;
  r.c1 = c.passives.c1;
  r.cp = c.passives.cp;
  r.status = c.verdict.status;
  r.binding = c.verdict.binding;

  RecordDetail d;
  d.ls_refined = c.refined.ls;
  d.lg_refined = c.refined.lg;
  d.cx_refined = c.refined.cx;
  d.r_ls = c.passives.r_ls;
  d.r_lg = c.passives.r_lg;
  d.gm = c.device.gm;
  d.cgs = c.device.cgs;
  d.ic = c.device.ic;
  d.ft = c.device.ft;
  d.iterations = c.iterations;
  if (c.metrics) {
    const Metrics& m = *c.metrics;
    r.gain_db = m.gain_db;
    r.s11_db = m.s11_db;
    r.s22_db = m.s22_db;
    r.nf_db = m.nf_db;
    if (std::isfinite(m.iip3_dbm)) r.iip3_dbm = m.iip3_dbm;
    d.s11_band_db = m.s11_band_db;
    d.s22_band_db = m.s22_band_db;
    d.gm_eff = m.gm_eff;
  }
  r.detail = d;
  return r;
}

std::size_t SweepResult::feasible_count() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const SweepRecord& r) { return r.feasible(); }));
}

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LNA_FORGE_THREADS")) {
    unsigned cap = 0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, cap);
    if (ec == std::errc{} && ptr == end && cap > 0) n = std::min(n, cap);
  }
  return n;
}

SweepResult run_sweep(const SweepPlan& plan, const TechnologyCard& tech, const InductorLibrary& lib,
                      unsigned threads, const SynthOptions& options) {
  plan.validate();
  std::vector<SynthTarget> targets;
  targets.reserve(plan.size());
  for (double g : plan.gain_list)
    for (double id : plan.id_list)
      for (double w : plan.w1_list) {
        SynthTarget t;
        t.gain_db = g;
        t.gain_tol_db = plan.gain_tol_db;
        t.id = id;
        t.w1 = w;
        t.l_ch = plan.l_ch;
        t.match_floor_db = plan.match_floor_db;
        targets.push_back(t);
      }

  SweepResult result;
  result.plan = plan;
  result.tech_hash = card_hash(tech);
  result.records.resize(targets.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++)
      result.records[i] = make_record(synthesize(targets[i], tech, lib, options));
  };
  const unsigned n = std::min<std::size_t>(resolve_threads(threads), targets.size());
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
    work();
  }
  return result;
}

void SpecFilter::validate() const {
  for (double v : {min_gain_db, max_nf_db, min_iip3_dbm, match_ceiling_db})
    if (std::isnan(v)) throw Error(ErrorCode::InvalidValue, "filter", "filter thresholds must not be NaN");
}

SpecFilter SpecFilter::zigbee() {
  SpecFilter f;
  f.min_gain_db = 10.0;
  f.max_nf_db = 3.0;
  f.min_iip3_dbm = -4.0;
  f.match_ceiling_db = -10.0;
  return f;
}

bool SpecFilter::accepts(const SweepRecord& r) const {
  if (!r.feasible()) return false;
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto below = [](const std::optional<double>& v, double limit) { return limit == inf || (v && *v < limit); };
  auto above = [](const std::optional<double>& v, double limit) { return limit == -inf || (v && *v > limit); };
  auto at_least = [](const std::optional<double>& v, double limit) { return limit == -inf || (v && *v >= limit); };
  auto at_most = [](const std::optional<double>& v, double limit) { return limit == inf || (v && *v <= limit); };
  return at_least(r.gain_db, min_gain_db) && below(r.nf_db, max_nf_db) && above(r.iip3_dbm, min_iip3_dbm) &&
         at_most(r.s11_db, match_ceiling_db) && at_most(r.s22_db, match_ceiling_db);
}

SweepResult spec_filter(const SweepResult& result, const SpecFilter& filter) {
  filter.validate();
  SweepResult out = result;
  out.records.clear();
  std::copy_if(result.records.begin(), result.records.end(), std::back_inserter(out.records),
               [&](const SweepRecord& r) { return filter.accepts(r); });
  return out;
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::MaxGm: return "MaxGm";
    case Direction::MinId: return "MinId";
    case Direction::MinW1: return "MinW1";
    case Direction::MaxW1: return "MaxW1";
  }
  return "?";
}

const char* to_string(Effect e) {
  switch (e) {
    case Effect::None: return "--";
    case Effect::Primary: return "P";
    case Effect::Secondary: return "S";
    case Effect::Both: return "P+S";
  }
  return "?";
}

Effect expected_effect(Limit limit, Direction d) {
  using E = Effect;
  //                                  MaxGm       MinId    MinW1       MaxW1
  static constexpr E ls_min[4] = {E::Primary, E::Secondary, E::None, E::Secondary};
  static constexpr E lg_max[4] = {E::Primary, E::Both, E::Primary, E::Secondary};
  static constexpr E cx_min[4] = {E::Primary, E::Both, E::None, E::Both};
  const auto k = static_cast<std::size_t>(d);
  switch (limit) {
    case Limit::LsMin: return ls_min[k];
    case Limit::LgMax: return lg_max[k];
    case Limit::CxMin: return cx_min[k];
    default: return E::None;
  }
}

namespace {

std::size_t limit_row(Limit limit) {
  for (std::size_t i = 0; i < kMatrixLimits.size(); ++i)
    if (kMatrixLimits[i] == limit) return i;
  throw Error(ErrorCode::InvalidValue, "limit", std::string("no matrix row for ") + to_string(limit));
}

}  // namespace

int& BindingMatrix::at(Limit limit, Direction d) { return counts[limit_row(limit)][static_cast<std::size_t>(d)]; }
int BindingMatrix::at(Limit limit, Direction d) const { return counts[limit_row(limit)][static_cast<std::size_t>(d)]; }

BindingMatrix binding_matrix(const std::vector<SweepRecord>& records) {
  // Sweeps are rectangular per channel length; index each axis so that
  // "next grid point" is well defined.
  using Key = std::tuple<double, double, double, double>;  // l_ch, gain, id, w1
  std::map<Key, const SweepRecord*> grid;
  std::map<double, std::vector<double>> ws, ids, gains;  // per l_ch
  for (const auto& r : records) {
    grid[{r.l_ch, r.gain_target, r.id, r.w1}] = &r;
    ws[r.l_ch].push_back(r.w1);
    ids[r.l_ch].push_back(r.id);
    gains[r.l_ch].push_back(r.gain_target);
  }
  for (auto* axes : {&ws, &ids, &gains})
    for (auto& [l, v] : *axes) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  auto step = [](const std::vector<double>& axis, double v, int dir) -> std::optional<double> {
    const auto it = std::lower_bound(axis.begin(), axis.end(), v);
    const auto k = (it - axis.begin()) + dir;
    if (k < 0 || k >= static_cast<long>(axis.size())) return std::nullopt;
    return axis[static_cast<std::size_t>(k)];
  };
  auto feasible_at = [&](const Key& k) {
    const auto it = grid.find(k);
    return it != grid.end() && it->second->feasible();
  };

  BindingMatrix m;
  for (const auto& r : records) {
    if (r.feasible()) continue;
    const double l = r.l_ch;
    std::vector<Direction> dirs;
    if (auto g = step(gains[l], r.gain_target, -1); g && feasible_at({l, *g, r.id, r.w1})) dirs.push_back(Direction::MaxGm);
    if (auto i = step(ids[l], r.id, +1); i && feasible_at({l, r.gain_target, *i, r.w1})) dirs.push_back(Direction::MinId);
    if (auto w = step(ws[l], r.w1, +1); w && feasible_at({l, r.gain_target, r.id, *w})) dirs.push_back(Direction::MinW1);
    if (auto w = step(ws[l], r.w1, -1); w && feasible_at({l, r.gain_target, r.id, *w})) dirs.push_back(Direction::MaxW1);
    for (Limit lim : kMatrixLimits)
      if (r.binding.contains(lim))
        for (Direction d : dirs) ++m.at(lim, d);
  }
  return m;
}

BindingMatrix binding_matrix(const SweepResult& result) { return binding_matrix(result.records); }

std::string report(const SweepResult& result, const SpecFilter& filter, const std::string& filter_name) {
  std::ostringstream os;
  const std::size_t feasible = result.feasible_count();
  os << "tech: " << (result.tech_hash.empty() ? "unknown" : result.tech_hash) << '\n';
  os << "engine: " << (result.engine_version.empty() ? "unknown" : result.engine_version) << '\n';
  if (result.plan) os << "sweep: " << to_string(result.plan->kind) << '\n';
  os << "records: " << result.records.size() << '\n';
  os << "feasible: " << feasible << '\n';
  os << "infeasible: " << result.records.size() - feasible << '\n';

  os << "binding:";
  for (Limit lim : kAllLimits) {
    const auto n = std::count_if(result.records.begin(), result.records.end(),
                                 [&](const SweepRecord& r) { return r.binding.contains(lim); });
    os << ' ' << to_string(lim) << '=' << n;
  }
  os << '\n';

  const BindingMatrix m = binding_matrix(result);
  char line[128];
  os << "boundary matrix (count / expected):\n";
  std::snprintf(line, sizeof line, "  %-6s", "");
  os << line;
  for (Direction d : kDirections) {
    std::snprintf(line, sizeof line, " %10s", to_string(d));
    os << line;
  }
  os << '\n';
  for (Limit lim : kMatrixLimits) {
    std::snprintf(line, sizeof line, "  %-6s", to_string(lim));
    os << line;
    for (Direction d : kDirections) {
      std::snprintf(line, sizeof line, " %4d / %-3s", m.at(lim, d), to_string(expected_effect(lim, d)));
      os << line;
    }
    os << '\n';
  }

  const std::size_t passed = spec_filter(result, filter).records.size();
  os << "filter " << filter_name << ": " << passed << " of " << feasible << " feasible\n";
  return os.str();
}

}  // namespace lnaforge
