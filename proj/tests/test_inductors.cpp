#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "lnaforge/error.hpp"
#include "lnaforge/inductors.hpp"
#include "lnaforge/techcard.hpp"

using namespace lnaforge;

namespace {

constexpr double kPi = 3.141592653589793;

// Current-sheet expression for an octagonal spiral, written out from the
// published coefficients (c1..c4 = 1.07, 2.29, 0, 0.19). Inner diameter
// follows the layout rule din = dout - 2 n (w + s).
double current_sheet_oracle(double n, double dout, double w, double s) {
  const double mu0 = 4.0 * kPi * 1e-7;
  const double din = dout - 2.0 * n * (w + s);
  const double davg = (dout + din) / 2.0;
  const double rho = (dout - din) / (dout + din);
  return mu0 * n * n * davg * 1.07 / 2.0 * (std::log(2.29 / rho) + 0.0 * rho + 0.19 * rho * rho);
}

InductorSpec fake(double L, double q, double omega0) {
  InductorSpec m;
  m.geometry = {1.0, 100e-6, 4e-6, 2e-6};
  m.L = L;
  m.q_at_f0 = q;
  m.r_series = omega0 * L / q;
  m.r_parallel = omega0 * L * q;
  return m;
}

TechnologyCard single_point_card() {
  TechnologyCard t = default_card();
  t.limits.nt = {2.0, 2.0, 0.25};
  t.limits.od = {200e-6, 200e-6, 10e-6};
  t.limits.w = {8e-6, 8e-6, 2e-6};
  return t;
}

}  // namespace

TEST_CASE("inductance matches the current-sheet oracle") {
  const InductorGeometry g{2.75, 200e-6, 6e-6, 2e-6};
  const double L = inductance_of(g);
  CHECK(L == doctest::Approx(current_sheet_oracle(2.75, 200e-6, 6e-6, 2e-6)).epsilon(1e-12));
  CHECK(L == doctest::Approx(2.644e-9).epsilon(1e-3));  // hand evaluation

  for (double n = 1.0; n <= 6.0; n += 0.25) {
    for (double od = 150e-6; od <= 400e-6; od += 50e-6) {
      const InductorGeometry q{n, od, 10e-6, 2e-6};
      if (!q.realizable()) continue;
      CHECK(inductance_of(q) == doctest::Approx(current_sheet_oracle(n, od, 10e-6, 2e-6)).epsilon(1e-12));
    }
  }
}

TEST_CASE("doubling the turn count at fixed fill more than doubles L") {
  // Same fill ratio: scale the pitch down with the turn count.
  const InductorGeometry a{2.0, 300e-6, 8e-6, 2e-6};
  const InductorGeometry b{4.0, 300e-6, 3e-6, 2e-6};
  CHECK(a.fill_ratio() == doctest::Approx(b.fill_ratio()).epsilon(1e-12));
  CHECK(inductance_of(b) > 2.0 * inductance_of(a));
  CHECK(current_sheet_oracle(4.0, 300e-6, 3e-6, 2e-6) > 2.0 * current_sheet_oracle(2.0, 300e-6, 8e-6, 2e-6));
}

TEST_CASE("unrealizable geometry is an error") {
  CHECK_THROWS_AS(inductance_of({0.2, 200e-6, 6e-6, 2e-6}), Error);
  CHECK_THROWS_AS(inductance_of({2.0, 200e-6, 0.0, 2e-6}), Error);
  CHECK_THROWS_AS(inductance_of({10.0, 100e-6, 6e-6, 2e-6}), Error);  // od <= 2 nt (w + s)
  try {
    inductance_of({0.2, 200e-6, 6e-6, 2e-6});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnrealizableGeometry);
  }
}

TEST_CASE("inductance is monotone in turns and outer diameter over the library grid") {
  const TechnologyCard t = default_card();
  for (double w = t.limits.w.min; w <= t.limits.w.max + 1e-12; w += t.limits.w.step) {
    for (double od = t.limits.od.min; od <= t.limits.od.max + 1e-12; od += 30e-6) {
      double prev = 0.0;
      for (double n = t.limits.nt.min; n <= t.limits.nt.max; n += t.limits.nt.step) {
        const InductorGeometry g{n, od, w, t.limits.s};
        if (!g.realizable() || g.fill_ratio() > kMaxFillRatio) break;
        const double L = inductance_of(g);
        CHECK(L > prev);
        prev = L;
      }
    }
    for (double n = t.limits.nt.min; n <= t.limits.nt.max; n += 1.0) {
      double prev = 0.0;
      for (double od = t.limits.od.min; od <= t.limits.od.max + 1e-12; od += t.limits.od.step) {
        const InductorGeometry g{n, od, w, t.limits.s};
        if (!g.realizable() || g.fill_ratio() > kMaxFillRatio) continue;
        const double L = inductance_of(g);
        CHECK(L > prev);
        prev = L;
      }
    }
  }
}

TEST_CASE("quality factor") {
  const InductorGeometry g{2.75, 200e-6, 6e-6, 2e-6};
  TechnologyCard t = default_card();

  SUBCASE("series-loss regime scales inversely with sheet resistance") {
    t.sub_loss_k = 0.0;
    const double q1 = q_of(g, t.f0, t);
    t.sheet_res *= 2.0;
    CHECK(q_of(g, t.f0, t) == doctest::Approx(q1 / 2.0).epsilon(1e-12));
    CHECK(q1 == doctest::Approx(t.omega0() * inductance_of(g) / series_resistance(g, t.f0, default_card()))
                    .epsilon(1e-9));
  }
  SUBCASE("representative geometry lands in the usual on-chip range") {
    const double q = q_of(g, t.f0, t);
    CHECK(q >= 3.0);
    CHECK(q <= 20.0);
  }
  SUBCASE("substrate loss pulls Q below the series-only value at high frequency") {
    TechnologyCard lossless = t;
    lossless.sub_loss_k = 0.0;
    const double f = 10.0 * t.f0;
    CHECK(q_of(g, f, t) < q_of(g, f, lossless));
  }
  SUBCASE("higher sheet resistance lowers Q") {
    const double q1 = q_of(g, t.f0, t);
    t.sheet_res *= 1.5;
    CHECK(q_of(g, t.f0, t) < q1);
  }
  SUBCASE("non-positive frequency is rejected") {
    CHECK_THROWS_AS(q_of(g, 0.0, t), Error);
  }
}

TEST_CASE("default library spans the synthesis range") {
  const TechnologyCard t = default_card();
  const auto lib = build_library(t);
  REQUIRE(!lib.empty());
  CHECK(lib.front().L <= 1e-9);
  CHECK(lib.back().L >= 18e-9);
  CHECK(std::is_sorted(lib.begin(), lib.end(), [](const auto& a, const auto& b) { return a.L < b.L; }));
  for (const auto& m : lib) {
    CHECK(m.L > 0.0);
    CHECK(m.q_at_f0 > 0.0);
    CHECK(m.r_parallel == t.omega0() * m.L * m.q_at_f0);
    CHECK(m.geometry.realizable());
  }
  // Deduplicated on geometry.
  for (std::size_t i = 0; i < lib.size(); ++i)
    for (std::size_t j = i + 1; j < lib.size() && lib[j].L == lib[i].L; ++j) CHECK(!(lib[i].geometry == lib[j].geometry));
}

TEST_CASE("library Q matches the series-loss relation when substrate loss is off") {
  TechnologyCard t = default_card();
  t.sub_loss_k = 0.0;
  for (const auto& m : build_library(t)) {
    CHECK(m.q_at_f0 == doctest::Approx(t.omega0() * m.L / m.r_series).epsilon(1e-9));
  }
}

TEST_CASE("library grid edge cases") {
  SUBCASE("single point") {
    CHECK(build_library(single_point_card()).size() == 1);
  }
  SUBCASE("unrealizable points are skipped, not fatal") {
    TechnologyCard t = default_card();
    t.limits.od = {100e-6, 120e-6, 10e-6};
    std::size_t expected = 0;
    for (double n = t.limits.nt.min; n <= t.limits.nt.max + 1e-9; n += t.limits.nt.step)
      for (const double od : {100e-6, 110e-6, 120e-6})
        for (double w = t.limits.w.min; w <= t.limits.w.max + 1e-12; w += t.limits.w.step)
          if (od > 2.0 * n * (w + t.limits.s) && n * (w + t.limits.s) / (od - n * (w + t.limits.s)) <= kMaxFillRatio)
            ++expected;
    const auto lib = build_library(t);
    CHECK(lib.size() == expected);
    CHECK(expected < 29u * 3u * 7u);
  }
  SUBCASE("nothing realizable") {
    TechnologyCard t = default_card();
    t.limits.nt = {9.0, 9.0, 0.25};
    t.limits.od = {100e-6, 100e-6, 10e-6};
    CHECK_THROWS_AS(build_library(t), Error);
  }
}

TEST_CASE("max-Q envelope") {
  const double w0 = default_card().omega0();
  SUBCASE("keeps the better of two in a bin") {
    const std::vector<InductorSpec> lib{fake(2.1e-9, 5.0, w0), fake(2.3e-9, 9.0, w0)};
    const std::vector<double> bins{2e-9, 2.5e-9};
    const auto env = max_q_envelope(lib, bins);
    REQUIRE(env.size() == 1);
    CHECK(env[0].q_at_f0 == 9.0);
  }
  SUBCASE("empty bins are omitted") {
    const std::vector<InductorSpec> lib{fake(1.2e-9, 5.0, w0), fake(3.2e-9, 6.0, w0)};
    const auto env = max_q_envelope(lib, uniform_bins(1e-9, 4e-9, 0.5e-9));
    REQUIRE(env.size() == 2);
    CHECK(env[0].L == 1.2e-9);
    CHECK(env[1].L == 3.2e-9);
  }
  SUBCASE("empty library") {
    const std::vector<InductorSpec> none;
    const std::vector<double> bins{0.0, 1e-9};
    CHECK_THROWS_AS(max_q_envelope(none, bins), Error);
  }
  SUBCASE("default library: subset, per-bin maximal, sorted") {
    const auto lib = build_library(default_card());
    const auto bins = uniform_bins(0.0, 20e-9, 0.5e-9);
    const auto env = max_q_envelope(lib, bins);
    CHECK(std::is_sorted(env.begin(), env.end(), [](const auto& a, const auto& b) { return a.L < b.L; }));
    for (const auto& e : env) {
      const auto b = static_cast<std::size_t>(std::floor(e.L / 0.5e-9));
      double best = 0.0;
      bool present = false;
      for (const auto& m : lib) {
        if (m.L >= bins[b] && m.L < bins[b + 1]) best = std::max(best, m.q_at_f0);
        present = present || (m.geometry == e.geometry && m.L == e.L);
      }
      CHECK(present);
      CHECK(e.q_at_f0 == best);
    }
  }
}

TEST_CASE("default max-Q envelope shape and snapshot") {
  const auto lib = build_library(default_card());
  const auto env = max_q_envelope(lib, uniform_bins(0.0, 20e-9, 0.5e-9));

  // Over the synthesis range Q rises (non-strictly) to a single peak and then
  // falls, or is monotone. Bin-to-bin noise above lg_max is not asserted.
  std::size_t n = 0;
  while (n < env.size() && env[n].L <= default_card().limits.lg_max) ++n;
  REQUIRE(n > 30);
  std::size_t i = 1;
  while (i < n && env[i].q_at_f0 >= env[i - 1].q_at_f0) ++i;
  while (i < n && env[i].q_at_f0 <= env[i - 1].q_at_f0) ++i;
  CHECK(i == n);

  std::ostringstream snap;
  snap.precision(6);
  for (const auto& e : env) snap << e.L << ',' << e.q_at_f0 << '\n';
  const auto golden = std::filesystem::path(LNAFORGE_GOLDEN_DIR) / "max_q_envelope.csv";
  if (std::getenv("LNAFORGE_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(golden) << snap.str();
  }
  std::ifstream in(golden);
  REQUIRE(in.good());
  std::stringstream want;
  want << in.rdbuf();
  CHECK(snap.str() == want.str());
}

TEST_CASE("drain inductor selection") {
  const double w0 = default_card().omega0();
  SUBCASE("picks the member nearest the target resistance") {
    const InductorSpec reference = fake(9.5e-9, 13.0, w0);
    CHECK(reference.r_parallel == doctest::Approx(1.90e3).epsilon(0.01));
    const std::vector<InductorSpec> lib{fake(3e-9, 6.0, w0), reference, fake(16e-9, 15.0, w0)};
    const InductorSpec d = select_drain_inductor(lib, {2000.0, DrainPreference::Any});
    CHECK(d.L == 9.5e-9);
    CHECK(d.q_at_f0 == 13.0);
    CHECK(select_drain_inductor(lib, {2000.0, DrainPreference::LowestQ}).L == 9.5e-9);
  }
  SUBCASE("single member wins whatever the target") {
    const std::vector<InductorSpec> lib{fake(5e-9, 8.0, w0)};
    CHECK(select_drain_inductor(lib, {1e6}).L == 5e-9);
    CHECK(select_drain_inductor(lib, {1.0}).L == 5e-9);
  }
  SUBCASE("equal distance resolves to the smaller inductance") {
    std::vector<InductorSpec> lib{fake(8e-9, 6.0, w0), fake(4e-9, 9.0, w0)};
    lib[0].r_parallel = 1800.0;
    lib[1].r_parallel = 2200.0;
    CHECK(select_drain_inductor(lib, {2000.0, DrainPreference::Any}).L == 4e-9);
    std::swap(lib[0], lib[1]);
    CHECK(select_drain_inductor(lib, {2000.0, DrainPreference::Any}).L == 4e-9);
  }
  SUBCASE("lowest-Q preference") {
    // Same resistance bin, different Q: the lossier one is chosen.
    const std::vector<InductorSpec> lib{fake(9.5e-9, 13.0, w0), fake(19e-9, 6.5, w0)};
    CHECK(select_drain_inductor(lib, {1900.0, DrainPreference::LowestQ}).q_at_f0 == 6.5);
  }
  SUBCASE("empty library") {
    CHECK_THROWS_AS(select_drain_inductor(std::vector<InductorSpec>{}, {}), Error);
  }
}

TEST_CASE("nearest inductor") {
  const double w0 = default_card().omega0();
  const PassiveLimits lim;
  const double u = std::ldexp(1.0, -30);  // ~0.93 nH; keeps midpoints exact
  const std::vector<InductorSpec> env{fake(2 * u, 8.0, w0), fake(3 * u, 9.0, w0), fake(5 * u, 10.0, w0)};

  CHECK(nearest_inductor(env, 3 * u, lim).L == 3 * u);
  CHECK(nearest_inductor(env, 4 * u, lim).L == 3 * u);  // midway: smaller wins
  CHECK(nearest_inductor(env, 4.1 * u, lim).L == 5 * u);
  CHECK(nearest_inductor(env, 17e-9, lim).L == 5 * u);

  try {
    nearest_inductor(env, 20e-9, lim);
    FAIL("expected LimitViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LimitViolation);
    CHECK(e.field() == "lg_max");
  }
  try {
    nearest_inductor(env, 0.5e-9, lim);
    FAIL("expected LimitViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LimitViolation);
    CHECK(e.field() == "ls_min");
  }
}

TEST_CASE("envelope interpolation") {
  const double w0 = default_card().omega0();
  const std::vector<InductorSpec> env{fake(2e-9, 8.0, w0), fake(4e-9, 10.0, w0)};
  CHECK(envelope_q(env, 1e-9) == 8.0);
  CHECK(envelope_q(env, 3e-9) == doctest::Approx(9.0));
  CHECK(envelope_q(env, 9e-9) == 10.0);
}
