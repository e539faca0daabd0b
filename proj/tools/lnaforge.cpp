// lnaforge command-line front end.
//
// Exit codes: 0 success, 1 the requested design (or every point of a sweep)
// is infeasible, 2 usage or configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lnaforge/error.hpp"
#include "lnaforge/explorer.hpp"
#include "lnaforge/export.hpp"
#include "lnaforge/synth.hpp"
#include "lnaforge/techcard.hpp"

namespace {

using namespace lnaforge;

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kUsage = 2;

TechnologyCard load_tech(const std::string& path) {
  TechnologyCard tech = path.empty() ? default_card() : load_card(path);
  std::cerr << "tech-card: " << tech.name << ' ' << card_hash(tech) << '\n';
  return tech;
}

ExportFormat format_of(const std::string& name) {
  const auto f = parse_format(name);
  if (!f) throw Error(ErrorCode::InvalidValue, "format", "format must be csv or json");
  return *f;
}

struct LibArgs {
  std::string tech;
  std::string out;
};

int run_lib_build(const LibArgs& a) {
  const TechnologyCard tech = load_tech(a.tech);
  const InductorLibrary lib = InductorLibrary::build(tech);
  if (a.out.empty()) {
    write_library_csv(std::cout, lib.members);
  } else {
    std::ofstream os(a.out, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, a.out, "cannot open " + a.out + " for writing");
    write_library_csv(os, lib.members);
  }
  std::fprintf(stderr, "library: %zu inductors; drain L=%.4g H Q=%.4g r_parallel=%.4g ohm\n", lib.members.size(),
               lib.drain.L, lib.drain.q_at_f0, lib.drain.r_parallel);
  return kOk;
}

struct SynthArgs {
  std::string tech;
  double gain = 10.5;
  double gain_tol = 0.5;
  double id = 0.4e-3;
  double w1 = 48e-6;
  double lch = 120e-9;
  double match_floor = -15.0;
  std::string mode = "full";
  std::string format = "csv";
};

int run_synth(const SynthArgs& a) {
  const TechnologyCard tech = load_tech(a.tech);
  SynthTarget t;
  t.gain_db = a.gain;
  t.gain_tol_db = a.gain_tol;
  t.id = a.id;
  t.w1 = a.w1;
  t.l_ch = a.lch;
  t.match_floor_db = a.match_floor;
  t.validate();
  SynthOptions opt;
  if (a.mode == "ideal") {
    opt.fidelity = Fidelity::Ideal;
  } else if (a.mode != "full") {
    throw Error(ErrorCode::InvalidValue, "mode", "mode must be ideal or full");
  }
  const auto format = format_of(a.format);

  const InductorLibrary lib = InductorLibrary::build(tech);
  SweepResult one;
  one.tech_hash = card_hash(tech);
  one.records.push_back(make_record(synthesize(t, tech, lib, opt)));
  if (format == ExportFormat::Csv)
    write_csv(std::cout, one);
  else
    write_json(std::cout, one);
  return one.records.front().feasible() ? kOk : kInfeasible;
}

struct SweepArgs {
  std::string kind;
  std::string tech;
  std::string out;
  std::string format = "csv";
  std::vector<double> w1;
  std::vector<double> id;
  std::vector<double> gain;
  double lch = 120e-9;
  double gain_tol = 0.5;
  double match_floor = -15.0;
  unsigned threads = 0;
};

int run_sweep_cmd(const SweepArgs& a) {
  const auto kind = parse_sweep_kind(a.kind);
  if (!kind) throw Error(ErrorCode::InvalidValue, "kind", "sweep kind must be wxid or gainxw");
  const auto format = format_of(a.format);
  const TechnologyCard tech = load_tech(a.tech);

  SweepPlan plan = SweepPlan::defaults(*kind, a.lch);
  if (!a.w1.empty()) plan.w1_list = a.w1;
  if (!a.id.empty()) plan.id_list = a.id;
  if (!a.gain.empty()) plan.gain_list = a.gain;
  plan.gain_tol_db = a.gain_tol;
  plan.match_floor_db = a.match_floor;
  plan.validate();

  const InductorLibrary lib = InductorLibrary::build(tech);
  const SweepResult result = run_sweep(plan, tech, lib, a.threads);
  if (a.out.empty()) {
    if (format == ExportFormat::Csv)
      write_csv(std::cout, result);
    else
      write_json(std::cout, result);
  } else {
    export_result(result, a.out, format);
  }
  std::fprintf(stderr, "sweep %s: %zu points, %zu feasible\n", to_string(plan.kind), result.records.size(),
               result.feasible_count());
  return result.feasible_count() > 0 ? kOk : kInfeasible;
}

struct ReportArgs {
  std::string input;
  std::string filter = "zigbee";
  std::optional<double> min_gain;
  std::optional<double> max_nf;
  std::optional<double> min_iip3;
  std::optional<double> match_ceiling;
};

int run_report(const ReportArgs& a) {
  const SweepResult result = load_result(a.input);
  std::cerr << "tech-card: " << (result.tech_hash.empty() ? "unknown (csv input)" : result.tech_hash) << '\n';
  SpecFilter f;
  if (a.filter == "zigbee") {
    f = SpecFilter::zigbee();
  } else if (a.filter != "none") {
    throw Error(ErrorCode::InvalidValue, "filter", "filter must be zigbee or none");
  }
  if (a.min_gain) f.min_gain_db = *a.min_gain;
  if (a.max_nf) f.max_nf_db = *a.max_nf;
  if (a.min_iip3) f.min_iip3_dbm = *a.min_iip3;
  if (a.match_ceiling) f.match_ceiling_db = *a.match_ceiling;
  std::cout << report(result, f, a.filter);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LNA passive-element synthesis and design-space exploration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  LibArgs lib_args;
  auto* lib = app.add_subcommand("lib", "Spiral inductor library");
  lib->require_subcommand(1);
  auto* lib_build = lib->add_subcommand("build", "Enumerate the geometry grid and write the library as CSV");
  lib_build->add_option("--tech", lib_args.tech, "Technology card (default: built-in default-130nm)");
  lib_build->add_option("--out", lib_args.out, "Output CSV (default: stdout)");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Synthesize one design point");
  synth->add_option("--tech", synth_args.tech, "Technology card (default: built-in default-130nm)");
  synth->add_option("--gain", synth_args.gain, "Target gain (dB)")->capture_default_str();
  synth->add_option("--gain-tol", synth_args.gain_tol, "Gain tolerance (dB)")->capture_default_str();
  synth->add_option("--id", synth_args.id, "Bias current (A)")->capture_default_str();
  synth->add_option("--w1", synth_args.w1, "Width of M1 (m)")->capture_default_str();
  synth->add_option("--lch", synth_args.lch, "Channel length (m)")->capture_default_str();
  synth->add_option("--match-floor", synth_args.match_floor, "Required S11/S22 (dB)")->capture_default_str();
  synth->add_option("--mode", synth_args.mode, "ideal or full")->capture_default_str();
  synth->add_option("--format", synth_args.format, "csv or json")->capture_default_str();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run a design-space sweep");
  sweep->add_option("kind", sweep_args.kind, "wxid or gainxw")->required();
  sweep->add_option("--tech", sweep_args.tech, "Technology card (default: built-in default-130nm)");
  sweep->add_option("--out", sweep_args.out, "Output file (default: stdout)");
  sweep->add_option("--format", sweep_args.format, "csv or json")->capture_default_str();
  sweep->add_option("--w1", sweep_args.w1, "Widths (m), comma separated")->delimiter(',');
  sweep->add_option("--id", sweep_args.id, "Bias currents (A), comma separated")->delimiter(',');
  sweep->add_option("--gain", sweep_args.gain, "Target gains (dB), comma separated")->delimiter(',');
  sweep->add_option("--lch", sweep_args.lch, "Channel length (m)")->capture_default_str();
  sweep->add_option("--gain-tol", sweep_args.gain_tol, "Gain tolerance (dB)")->capture_default_str();
  sweep->add_option("--match-floor", sweep_args.match_floor, "Required S11/S22 (dB)")->capture_default_str();
  sweep->add_option("--threads", sweep_args.threads, "Worker threads (0 = auto; LNA_FORGE_THREADS caps it)");

  ReportArgs report_args;
  auto* rep = app.add_subcommand("report", "Summarize an exported sweep");
  rep->add_option("input", report_args.input, "Sweep export (csv or json)")->required();
  rep->add_option("--filter", report_args.filter, "zigbee or none")->capture_default_str();
  rep->add_option("--min-gain", report_args.min_gain, "Override minimum gain (dB)");
  rep->add_option("--max-nf", report_args.max_nf, "Override maximum NF (dB)");
  rep->add_option("--min-iip3", report_args.min_iip3, "Override minimum IIP3 (dBm)");
  rep->add_option("--match-ceiling", report_args.match_ceiling, "Override S11/S22 ceiling (dB)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*lib_build) return run_lib_build(lib_args);
    if (*synth) return run_synth(synth_args);
    if (*sweep) return run_sweep_cmd(sweep_args);
    if (*rep) return run_report(report_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
