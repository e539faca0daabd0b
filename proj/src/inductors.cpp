#include "lnaforge/inductors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>
#include <vector>

#include "lnaforge/error.hpp"

namespace lnaforge {

namespace {

constexpr double kMu0 = 4e-7 * std::numbers::pi;

// Current-sheet coefficients for octagonal spirals.
constexpr double kC1 = 1.07;
constexpr double kC2 = 2.29;
constexpr double kC3 = 0.00;
constexpr double kC4 = 0.19;

std::vector<double> grid_values(const GridRange& r) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((r.max - r.min) / r.step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(r.min + static_cast<double>(i) * r.step);
  return out;
}

// Index of the half-open bin holding x, or -1.
long bin_index(std::span<const double> edges, double x) {
  if (edges.size() < 2 || x < edges.front() || x >= edges.back()) return -1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  return static_cast<long>(it - edges.begin()) - 1;
}

}  // namespace

double InductorGeometry::trace_length() const {
  const double perimeter = 8.0 * std::tan(std::numbers::pi / 8.0) * mean_diameter();
  return nt * perimeter;
}

bool InductorGeometry::realizable() const noexcept {
  return nt >= 0.25 && w > 0.0 && s >= 0.0 && od > 2.0 * nt * (w + s);
}

void InductorGeometry::validate() const {
  if (!realizable()) {
    throw Error(ErrorCode::UnrealizableGeometry, "geometry",
                "UnrealizableGeometry: need nt >= 0.25, w > 0 and od > 2*nt*(w+s)");
  }
}

double inductance_of(const InductorGeometry& geom) {
  geom.validate();
  const double rho = geom.fill_ratio();
  return 0.5 * kMu0 * geom.nt * geom.nt * geom.mean_diameter() * kC1 *
         (std::log(kC2 / rho) + kC3 * rho + kC4 * rho * rho);
}

double series_resistance(const InductorGeometry& geom, double f, const TechnologyCard& tech) {
  geom.validate();
  const double skin_depth = std::sqrt(tech.metal_resistivity / (std::numbers::pi * f * kMu0));
  const double skin = std::max(1.0, geom.w / (2.0 * skin_depth));
  return tech.sheet_res * (geom.trace_length() / geom.w) * skin;
}

double q_of(const InductorGeometry& geom, double f, const TechnologyCard& tech) {
  if (!(f > 0.0)) throw Error(ErrorCode::NonPositiveInput, "f", "NonPositiveInput: f must be > 0");
  const double q_series = 2.0 * std::numbers::pi * f * inductance_of(geom) / series_resistance(geom, f, tech);
  return 1.0 / (1.0 / q_series + tech.sub_loss_k * (f / tech.f0));
}

InductorSpec make_inductor(const InductorGeometry& geom, const TechnologyCard& tech) {
  InductorSpec spec;
  spec.geometry = geom;
  spec.L = inductance_of(geom);
  spec.q_at_f0 = q_of(geom, tech.f0, tech);
  spec.r_series = series_resistance(geom, tech.f0, tech);
  spec.r_parallel = tech.omega0() * spec.L * spec.q_at_f0;
  return spec;
}

std::vector<InductorSpec> build_library(const TechnologyCard& tech) {
  const auto& lim = tech.limits;
  std::vector<InductorSpec> lib;
  std::set<std::tuple<long, long, long>> seen;
  for (const double nt : grid_values(lim.nt)) {
    for (const double od : grid_values(lim.od)) {
      for (const double w : grid_values(lim.w)) {
        const InductorGeometry geom{nt, od, w, lim.s};
        if (!geom.realizable() || geom.fill_ratio() > kMaxFillRatio) continue;
        // Dedupe on a 1 nm / quarter-turn lattice.
        const auto key = std::make_tuple(std::lround(nt * 4.0), std::lround(od * 1e9), std::lround(w * 1e9));
        if (!seen.insert(key).second) continue;
        lib.push_back(make_inductor(geom, tech));
      }
    }
  }
  if (lib.empty()) throw Error(ErrorCode::EmptyGrid, "limits", "EmptyGrid: no realizable spiral in the geometry grid");
  std::stable_sort(lib.begin(), lib.end(), [](const InductorSpec& a, const InductorSpec& b) { return a.L < b.L; });
  return lib;
}

std::vector<double> uniform_bins(double lo, double hi, double width) {
  std::vector<double> edges{lo};
  for (long i = 1; edges.back() < hi; ++i) edges.push_back(lo + static_cast<double>(i) * width);
  if (edges.size() < 2) edges.push_back(lo + width);
  return edges;
}

std::vector<InductorSpec> max_q_envelope(std::span<const InductorSpec> lib, std::span<const double> bins) {
  if (lib.empty()) throw Error(ErrorCode::EmptyLibrary, "library", "EmptyLibrary: no inductors");
  std::vector<const InductorSpec*> best(bins.size(), nullptr);
  for (const auto& m : lib) {
    const long b = bin_index(bins, m.L);
    if (b < 0) continue;
    auto& slot = best[static_cast<std::size_t>(b)];
    if (slot == nullptr || m.q_at_f0 > slot->q_at_f0) slot = &m;
  }
  std::vector<InductorSpec> out;
  for (const auto* p : best)
    if (p != nullptr) out.push_back(*p);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.L < b.L; });
  return out;
}

std::vector<InductorSpec> min_q_envelope(std::span<const InductorSpec> lib, std::span<const double> bins) {
  if (lib.empty()) throw Error(ErrorCode::EmptyLibrary, "library", "EmptyLibrary: no inductors");
  std::vector<const InductorSpec*> best(bins.size(), nullptr);
  for (const auto& m : lib) {
    const long b = bin_index(bins, m.r_parallel);
    if (b < 0) continue;
    auto& slot = best[static_cast<std::size_t>(b)];
    if (slot == nullptr || m.q_at_f0 < slot->q_at_f0) slot = &m;
  }
  std::vector<InductorSpec> out;
  for (const auto* p : best)
    if (p != nullptr) out.push_back(*p);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.r_parallel < b.r_parallel; });
  return out;
}

InductorSpec select_drain_inductor(std::span<const InductorSpec> lib, const DrainPolicy& policy) {
  if (lib.empty()) throw Error(ErrorCode::EmptyLibrary, "library", "EmptyLibrary: no inductors");
  std::vector<InductorSpec> pool(lib.begin(), lib.end());
  if (policy.prefer == DrainPreference::LowestQ) {
    double r_max = 0.0;
    for (const auto& m : lib) r_max = std::max(r_max, m.r_parallel);
    pool = min_q_envelope(lib, uniform_bins(0.0, r_max * (1.0 + 1e-12) + policy.r_bin_width, policy.r_bin_width));
  }
  const InductorSpec* best = nullptr;
  double best_dist = 0.0;
  for (const auto& m : pool) {
    const double d = std::abs(m.r_parallel - policy.r_parallel_target);
    if (best == nullptr || d < best_dist || (d == best_dist && m.L < best->L)) {
      best = &m;
      best_dist = d;
    }
  }
  return *best;
}

InductorSpec nearest_inductor(std::span<const InductorSpec> envelope, double l_target, const PassiveLimits& limits) {
  if (l_target < limits.ls_min)
    throw Error(ErrorCode::LimitViolation, "ls_min", "LimitViolation: requested inductance below ls_min");
  if (l_target > limits.lg_max)
    throw Error(ErrorCode::LimitViolation, "lg_max", "LimitViolation: requested inductance above lg_max");
  if (envelope.empty()) throw Error(ErrorCode::EmptyLibrary, "library", "EmptyLibrary: empty envelope");
  const InductorSpec* best = nullptr;
  double best_dist = 0.0;
  for (const auto& m : envelope) {
    const double d = std::abs(m.L - l_target);
    if (best == nullptr || d < best_dist || (d == best_dist && m.L < best->L)) {
      best = &m;
      best_dist = d;
    }
  }
  return *best;
}

double envelope_q(std::span<const InductorSpec> envelope, double L) {
  if (envelope.empty()) throw Error(ErrorCode::EmptyLibrary, "library", "EmptyLibrary: empty envelope");
  if (L <= envelope.front().L) return envelope.front().q_at_f0;
  if (L >= envelope.back().L) return envelope.back().q_at_f0;
  const auto hi = std::upper_bound(envelope.begin(), envelope.end(), L,
                                   [](double x, const InductorSpec& m) { return x < m.L; });
  const auto lo = hi - 1;
  const double t = (L - lo->L) / (hi->L - lo->L);
  return lo->q_at_f0 + t * (hi->q_at_f0 - lo->q_at_f0);
}

}  // namespace lnaforge
