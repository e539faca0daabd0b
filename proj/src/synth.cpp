#include "lnaforge/synth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "lnaforge/error.hpp"

namespace lnaforge {

const char* to_string(Limit limit) {
  switch (limit) {
    case Limit::LsMin: return "LsMin";
    case Limit::LgMax: return "LgMax";
    case Limit::CxMin: return "CxMin";
    case Limit::CMax: return "CMax";
    case Limit::NoConverge: return "NoConverge";
  }
  return "?";
}

std::optional<Limit> parse_limit(std::string_view name) {
  for (const Limit l : kAllLimits)
    if (name == to_string(l)) return l;
  return std::nullopt;
}

std::vector<Limit> LimitSet::items() const {
  std::vector<Limit> out;
  for (const Limit l : kAllLimits)
    if (contains(l)) out.push_back(l);
  return out;
}

std::string LimitSet::str() const {
  std::string out;
  for (const Limit l : items()) {
    if (!out.empty()) out += '|';
    out += to_string(l);
  }
  return out;
}

LimitSet LimitSet::parse(std::string_view text) {
  LimitSet set;
  while (!text.empty()) {
    const auto bar = text.find('|');
    const auto token = text.substr(0, bar);
    const auto limit = parse_limit(token);
    if (!limit) throw Error(ErrorCode::ParseError, "binding", "ParseError: unknown limit '" + std::string(token) + "'");
    set.insert(*limit);
    text = bar == std::string_view::npos ? std::string_view{} : text.substr(bar + 1);
  }
  return set;
}

void SynthTarget::validate() const {
  if (!(gain_tol_db > 0.0)) throw Error(ErrorCode::InvalidValue, "gain_tol_db", "InvalidValue: gain_tol_db must be > 0");
  if (!(match_floor_db < -10.0))
    throw Error(ErrorCode::InvalidValue, "match_floor_db", "InvalidValue: match_floor_db must be below -10 dB");
  if (!std::isfinite(gain_db)) throw Error(ErrorCode::InvalidValue, "gain_db", "InvalidValue: gain_db must be finite");
}

InductorLibrary InductorLibrary::from_members(std::vector<InductorSpec> members, const DrainPolicy& policy,
                                              double snap_bin_width) {
  if (members.empty()) throw Error(ErrorCode::EmptyLibrary, "library", "EmptyLibrary: no inductors");
  InductorLibrary lib;
  lib.members = std::move(members);
  double l_max = 0.0;
  for (const auto& m : lib.members) l_max = std::max(l_max, m.L);
  lib.q_envelope = max_q_envelope(lib.members, uniform_bins(0.0, l_max * (1.0 + 1e-12), kEnvelopeBinWidth));
  lib.snap_envelope = max_q_envelope(lib.members, uniform_bins(0.0, l_max * (1.0 + 1e-12), snap_bin_width));
  lib.drain = select_drain_inductor(lib.members, policy);
  return lib;
}

InductorLibrary InductorLibrary::build(const TechnologyCard& tech, const DrainPolicy& policy, double snap_bin_width) {
  return from_members(build_library(tech), policy, snap_bin_width);
}

PassiveSet seed_passives(const SynthTarget& target, const TechnologyCard& tech, const DevicePoint& device,
                         const InductorSpec& ld) {
  PassiveSet p;
  p.ld = ld;
  const double g_o = output_stage(device, p, tech.f0, Fidelity::Ideal, tech).g_o_prime;
  if (!(g_o > 0.0)) throw Error(ErrorCode::InvalidValue, "g_o_prime", "InvalidValue: output conductance must be > 0");

  const double w0 = tech.omega0();
  const double gm_eff = std::sqrt(from_db(target.gain_db) * g_o / tech.rs);
  p.ls = 1.0 / (2.0 * w0 * gm_eff);
  const double ct = device.gm * p.ls / tech.rs;
  p.cx = ct - device.cgs;
  p.lg = 1.0 / (w0 * w0 * ct) - p.ls;

  if (const auto div = solve_divider(ld, 0.0, tech.f0, tech.rl)) {
    p.c1 = div->c1;
    p.cp = div->cp;
  }
  return p;
}

namespace {

double loss_of(double L, std::span<const InductorSpec> envelope, double w0) {
  if (envelope.empty() || L <= 0.0) return 0.0;
  return w0 * L / envelope_q(envelope, L);
}

// Residuals scaled by their spec tolerance: converged when all |r_i| < 1e-3.
struct Scales {
  double z;     // Ω
  double gain;  // dB
};

Scales scales_for(const SynthTarget& target, const TechnologyCard& tech) {
  const double gamma = std::pow(10.0, target.match_floor_db / 20.0);
  return {tech.rs * gamma, target.gain_tol_db};
}

constexpr double kConverged = 1e-3;

// Generic damped Newton over N unknowns (scaled units), N residuals.
template <int N>
struct Newton {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;

  template <typename F>
  static std::pair<bool, int> solve(Vec& x, F&& residual, int max_iterations) {
    Vec r = residual(x);
    if (!r.allFinite()) return {false, 0};
    for (int it = 0; it < max_iterations; ++it) {
      if (r.cwiseAbs().maxCoeff() < kConverged) return {true, it};
      Mat jac;
      for (int k = 0; k < N; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
        Vec xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        jac.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
      }
      if (!jac.allFinite()) return {false, it};
      const Vec step = jac.fullPivLu().solve(-r);
      if (!step.allFinite()) return {false, it};

      double lambda = 1.0;
      bool accepted = false;
      for (int k = 0; k < 30; ++k, lambda *= 0.5) {
        const Vec trial = x + lambda * step;
        const Vec rt = residual(trial);
        if (rt.allFinite() && rt.squaredNorm() < r.squaredNorm()) {
          x = trial;
          r = rt;
          accepted = true;
          break;
        }
      }
      if (!accepted) return {false, it};
    }
    return {r.cwiseAbs().maxCoeff() < kConverged, max_iterations};
  }
};

constexpr double kNano = 1e-9;
constexpr double kPico = 1e-12;

}  // namespace

RefineResult refine_passives(const PassiveSet& seed, const SynthTarget& target, const TechnologyCard& tech,
                             const DevicePoint& device, std::span<const InductorSpec> q_envelope, Fidelity mode,
                             int max_iterations) {
  const double w0 = tech.omega0();
  const Scales sc = scales_for(target, tech);

  auto apply = [&](const Eigen::Vector3d& x) {
    PassiveSet p = seed;
    p.ls = x(0) * kNano;
    p.cx = x(1) * kPico;
    p.lg = x(2) * kNano;
    p.r_ls = loss_of(p.ls, q_envelope, w0);
    p.r_lg = loss_of(p.lg, q_envelope, w0);
    return p;
  };
  auto residual = [&](const Eigen::Vector3d& x) -> Eigen::Vector3d {
    if (!(x(0) > 0.0)) return Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
    const PassiveSet p = apply(x);
    const auto zin = input_impedance(device, p, tech.f0, mode, tech);
    const double g = gain(device, p, tech.f0, mode, tech);
    return {(zin.real() - tech.rs) / sc.z, zin.imag() / sc.z, (g - target.gain_db) / sc.gain};
  };

  Eigen::Vector3d x(seed.ls / kNano, seed.cx / kPico, seed.lg / kNano);
  RefineResult out;
  // An already-converged seed is returned untouched (bit-identical).
  if (const auto r0 = residual(x); r0.allFinite() && r0.cwiseAbs().maxCoeff() < kConverged) {
    out.passives = seed;
    out.passives.r_ls = loss_of(seed.ls, q_envelope, w0);
    out.passives.r_lg = loss_of(seed.lg, q_envelope, w0);
    out.converged = true;
    return out;
  }
  const auto [ok, iters] = Newton<3>::solve(x, residual, max_iterations);
  out.passives = apply(x);
  out.converged = ok;
  out.iterations = iters;
  return out;
}

FeasibilityVerdict classify(const PassiveSet& p, const TechnologyCard& tech) {
  const auto& lim = tech.limits;
  FeasibilityVerdict v;
  v.margin.ls = p.ls - lim.ls_min;
  v.margin.lg = lim.lg_max - p.lg;
  v.margin.cx = std::min(p.cx - lim.cx_min, lim.c_max - p.cx);
  v.margin.c1 = lim.c_max - p.c1;
  v.margin.cp = lim.c_max - p.cp;

  if (p.ls < lim.ls_min) v.binding.insert(Limit::LsMin);
  if (p.lg > lim.lg_max) v.binding.insert(Limit::LgMax);
  if (p.cx < lim.cx_min) v.binding.insert(Limit::CxMin);
  if (p.cx > lim.c_max || p.c1 > lim.c_max || p.cp > lim.c_max) v.binding.insert(Limit::CMax);
  v.status = v.binding.empty() ? Status::Feasible : Status::Infeasible;
  return v;
}

namespace {

void clamp_cx(PassiveSet& p, const TechnologyCard& tech, double clamp) {
  if (p.cx < tech.limits.cx_min && p.cx >= tech.limits.cx_min - clamp) p.cx = tech.limits.cx_min;
}

void mark_infeasible(DesignCandidate& c, Limit limit) {
  c.verdict.binding.insert(limit);
  c.verdict.status = Status::Infeasible;
}

// Nearest snap-envelope member within the tolerance, or the limit to report.
std::variant<InductorSpec, Limit> snap(const InductorLibrary& lib, double l_target, const TechnologyCard& tech,
                                       double tolerance, Limit too_large) {
  try {
    InductorSpec m = nearest_inductor(lib.snap_envelope, l_target, tech.limits);
    if (std::abs(m.L - l_target) > tolerance * l_target) return l_target > m.L ? too_large : Limit::LsMin;
    return m;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::LimitViolation) throw;
    return e.field() == "lg_max" ? Limit::LgMax : Limit::LsMin;
  }
}

}  // namespace

DesignCandidate synthesize(const SynthTarget& target, const TechnologyCard& tech, const InductorLibrary& lib,
                           const SynthOptions& options) {
  target.validate();
  DesignCandidate c;
  c.target = target;
  c.device = device_point(target.w1, target.l_ch, target.id, tech, options.device_mode);
  const Fidelity mode = options.fidelity;
  const double w0 = tech.omega0();
  const Scales sc = scales_for(target, tech);
  std::span<const InductorSpec> q_env;
  if (mode == Fidelity::Full) q_env = lib.q_envelope;

  const PassiveSet seed = seed_passives(target, tech, c.device, lib.drain);
  const RefineResult refined = refine_passives(seed, target, tech, c.device, q_env, mode, options.max_iterations);
  c.passives = refined.passives;
  c.iterations = refined.iterations;
  clamp_cx(c.passives, tech, options.cx_clamp);
  c.refined = c.passives;

  c.verdict = classify(c.passives, tech);
  if (!refined.converged) mark_infeasible(c, Limit::NoConverge);
  if (!c.verdict.feasible()) return c;

  PassiveSet& p = c.passives;

  // Snap L_S, then re-match with (C_X, L_g) continuous.
  const auto ls_snap = snap(lib, p.ls, tech, options.snap_tolerance, Limit::LgMax);
  if (const auto* lim = std::get_if<Limit>(&ls_snap)) {
    mark_infeasible(c, *lim);
    return c;
  }
  const auto& ls_member = std::get<InductorSpec>(ls_snap);
  p.ls = ls_member.L;
  p.r_ls = mode == Fidelity::Full ? ls_member.loss_resistance(w0) : 0.0;
  p.ls_geometry = ls_member.geometry;

  auto match2 = [&](const Eigen::Vector2d& x) -> Eigen::Vector2d {
    PassiveSet q = p;
    q.cx = x(0) * kPico;
    q.lg = x(1) * kNano;
    q.r_lg = loss_of(q.lg, q_env, w0);
    const auto zin = input_impedance(c.device, q, tech.f0, mode, tech);
    return {(zin.real() - tech.rs) / sc.z, zin.imag() / sc.z};
  };
  Eigen::Vector2d x2(p.cx / kPico, p.lg / kNano);
  const auto [ok2, it2] = Newton<2>::solve(x2, match2, options.max_iterations);
  c.iterations += it2;
  p.cx = x2(0) * kPico;
  p.lg = x2(1) * kNano;
  if (!ok2) {
    mark_infeasible(c, Limit::NoConverge);
    return c;
  }

  const auto lg_snap = snap(lib, p.lg, tech, options.snap_tolerance, Limit::LgMax);
  if (const auto* lim = std::get_if<Limit>(&lg_snap)) {
    mark_infeasible(c, *lim);
    return c;
  }
  const auto& lg_member = std::get<InductorSpec>(lg_snap);
  p.lg = lg_member.L;
  p.r_lg = mode == Fidelity::Full ? lg_member.loss_resistance(w0) : 0.0;
  p.lg_geometry = lg_member.geometry;

  // C_X alone re-centres the input resonance.
  auto match1 = [&](const Eigen::Matrix<double, 1, 1>& x) -> Eigen::Matrix<double, 1, 1> {
    PassiveSet q = p;
    q.cx = x(0) * kPico;
    const auto zin = input_impedance(c.device, q, tech.f0, mode, tech);
    return Eigen::Matrix<double, 1, 1>(zin.imag() / sc.z);
  };
  Eigen::Matrix<double, 1, 1> x1(p.cx / kPico);
  const auto [ok1, it1] = Newton<1>::solve(x1, match1, options.max_iterations);
  c.iterations += it1;
  p.cx = x1(0) * kPico;
  if (!ok1) {
    mark_infeasible(c, Limit::NoConverge);
    return c;
  }
  clamp_cx(p, tech, options.cx_clamp);

  const auto y_od = output_stage(c.device, p, tech.f0, mode, tech).y_od;
  if (const auto div = solve_divider(p.ld, y_od, tech.f0, tech.rl)) {
    p.c1 = div->c1;
    p.cp = div->cp;
  } else {
    mark_infeasible(c, Limit::NoConverge);
    return c;
  }

  c.verdict = classify(p, tech);
  if (!c.verdict.feasible()) return c;

  const Metrics m = evaluate(c.device, p, mode, tech);
  const bool gain_ok = std::abs(m.gain_db - target.gain_db) <= target.gain_tol_db;
  const bool match_ok = m.s11_band_db <= target.match_floor_db && m.s22_band_db <= target.match_floor_db;
  if (!gain_ok || !match_ok) {
    mark_infeasible(c, Limit::NoConverge);
    return c;
  }
  c.metrics = m;
  return c;
}

}  // namespace lnaforge
