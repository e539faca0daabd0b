#include "lnaforge/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lnaforge/error.hpp"

namespace lnaforge {

using ojson = nlohmann::ordered_json;

std::optional<ExportFormat> parse_format(std::string_view name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  return std::nullopt;
}

namespace {

constexpr const char* kNull = "null";

const char* status_name(Status s) { return s == Status::Feasible ? "Feasible" : "Infeasible"; }

Status parse_status(std::string_view s) {
  if (s == "Feasible") return Status::Feasible;
  if (s == "Infeasible") return Status::Infeasible;
  throw Error(ErrorCode::ParseError, "status", "unknown status '" + std::string(s) + "'");
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : kNull; }

double parse_number(std::string_view text, const char* column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, column, std::string("bad number in column ") + column + ": '" + std::string(text) + "'");
  return v;
}

std::optional<double> parse_optional(std::string_view text, const char* column) {
  if (text == kNull || text.empty()) return std::nullopt;
  return parse_number(text, column);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// JSON has no NaN; a missing number is null.
ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }
ojson number(const std::optional<double>& v) { return v ? number(*v) : ojson(nullptr); }

double get_number(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

std::optional<double> get_optional(const ojson& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

ojson plan_json(const SweepPlan& p) {
  ojson j;
  j["kind"] = to_string(p.kind);
  j["l_ch"] = p.l_ch;
  j["w1"] = p.w1_list;
  j["id"] = p.id_list;
  j["gain"] = p.gain_list;
  j["gain_tol_db"] = p.gain_tol_db;
  j["match_floor_db"] = p.match_floor_db;
  return j;
}

SweepPlan plan_from(const ojson& j) {
  SweepPlan p;
  const auto kind = parse_sweep_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::ParseError, "kind", "unknown sweep kind");
  p.kind = *kind;
  p.l_ch = j.at("l_ch").get<double>();
  p.w1_list = j.at("w1").get<std::vector<double>>();
  p.id_list = j.at("id").get<std::vector<double>>();
  p.gain_list = j.at("gain").get<std::vector<double>>();
  p.gain_tol_db = j.at("gain_tol_db").get<double>();
  p.match_floor_db = j.at("match_floor_db").get<double>();
  return p;
}

ojson record_json(const SweepRecord& r) {
  ojson j;
  j["l_ch"] = number(r.l_ch);
  j["w1"] = number(r.w1);
  j["id"] = number(r.id);
  j["gain_target"] = number(r.gain_target);
  j["ls"] = number(r.ls);
  j["lg"] = number(r.lg);
  j["cx"] = number(r.cx);
  j["ld"] = number(r.ld);
  j["qd"] = number(r.qd);
  j["c1"] = number(r.c1);
  j["cp"] = number(r.cp);
  j["gain_db"] = number(r.gain_db);
  j["s11_db"] = number(r.s11_db);
  j["s22_db"] = number(r.s22_db);
  j["nf_db"] = number(r.nf_db);
  j["iip3_dbm"] = number(r.iip3_dbm);
  j["status"] = status_name(r.status);
  j["binding"] = r.binding.str();
  if (r.detail) {
    const RecordDetail& d = *r.detail;
    ojson dj;
    dj["ls_refined"] = number(d.ls_refined);
    dj["lg_refined"] = number(d.lg_refined);
    dj["cx_refined"] = number(d.cx_refined);
    dj["r_ls"] = number(d.r_ls);
    dj["r_lg"] = number(d.r_lg);
    dj["gm"] = number(d.gm);
    dj["cgs"] = number(d.cgs);
    dj["ic"] = number(d.ic);
    dj["ft"] = number(d.ft);
    dj["s11_band_db"] = number(d.s11_band_db);
    dj["s22_band_db"] = number(d.s22_band_db);
    dj["gm_eff"] = number(d.gm_eff);
    dj["iterations"] = d.iterations;
    j["detail"] = std::move(dj);
  }
  return j;
}

SweepRecord record_from(const ojson& j) {
  SweepRecord r;
  r.l_ch = get_number(j, "l_ch");
  r.w1 = get_number(j, "w1");
  r.id = get_number(j, "id");
  r.gain_target = get_number(j, "gain_target");
  r.ls = get_number(j, "ls");
  r.lg = get_number(j, "lg");
  r.cx = get_number(j, "cx");
  r.ld = get_number(j, "ld");
  r.qd = get_number(j, "qd");
  r.c1 = get_number(j, "c1");
  r.cp = get_number(j, "cp");
  r.gain_db = get_optional(j, "gain_db");
  r.s11_db = get_optional(j, "s11_db");
  r.s22_db = get_optional(j, "s22_db");
  r.nf_db = get_optional(j, "nf_db");
  r.iip3_dbm = get_optional(j, "iip3_dbm");
  r.status = parse_status(j.at("status").get<std::string>());
  r.binding = LimitSet::parse(j.at("binding").get<std::string>());
  if (const auto it = j.find("detail"); it != j.end() && !it->is_null()) {
    const ojson& dj = *it;
    RecordDetail d;
    d.ls_refined = get_number(dj, "ls_refined");
    d.lg_refined = get_number(dj, "lg_refined");
    d.cx_refined = get_number(dj, "cx_refined");
    d.r_ls = get_number(dj, "r_ls");
    d.r_lg = get_number(dj, "r_lg");
    d.gm = get_number(dj, "gm");
    d.cgs = get_number(dj, "cgs");
    d.ic = get_number(dj, "ic");
    d.ft = get_number(dj, "ft");
    d.s11_band_db = get_optional(dj, "s11_band_db");
    d.s22_band_db = get_optional(dj, "s22_band_db");
    d.gm_eff = get_optional(dj, "gm_eff");
    d.iterations = dj.at("iterations").get<int>();
    r.detail = d;
  }
  return r;
}

}  // namespace

void write_csv(std::ostream& os, const SweepResult& result) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : result.records) {
    os << format_double(r.l_ch) << ',' << format_double(r.w1) << ',' << format_double(r.id) << ','
       << format_double(r.gain_target) << ',' << format_double(r.ls) << ',' << format_double(r.lg) << ','
       << format_double(r.cx) << ',' << format_double(r.ld) << ',' << format_double(r.qd) << ','
       << format_double(r.c1) << ',' << format_double(r.cp) << ',' << cell(r.gain_db) << ',' << cell(r.s11_db) << ','
       << cell(r.s22_db) << ',' << cell(r.nf_db) << ',' << cell(r.iip3_dbm) << ',' << status_name(r.status) << ','
       << r.binding.str() << '\n';
  }
}

void write_json(std::ostream& os, const SweepResult& result) {
  ojson j;
  ojson prov;
  prov["engine"] = result.engine_version;
  prov["tech_hash"] = result.tech_hash;
  prov["plan"] = result.plan ? plan_json(*result.plan) : ojson(nullptr);
  j["provenance"] = std::move(prov);
  ojson recs = ojson::array();
  for (const auto& r : result.records) recs.push_back(record_json(r));
  j["records"] = std::move(recs);
  os << j.dump(1) << '\n';
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream os;
  write_csv(os, result);
  return os.str();
}

std::string to_json(const SweepResult& result) {
  std::ostringstream os;
  write_json(os, result);
  return os.str();
}

SweepResult read_csv(std::istream& is) {
  SweepResult result;
  result.engine_version.clear();
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "header", "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw Error(ErrorCode::ParseError, "header", "unexpected CSV header: " + line);
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 18)
      throw Error(ErrorCode::ParseError, "row", "row " + std::to_string(row) + " has " + std::to_string(f.size()) + " fields");
    SweepRecord r;
    r.l_ch = parse_number(f[0], "l_ch");
    r.w1 = parse_number(f[1], "w1");
    r.id = parse_number(f[2], "id");
    r.gain_target = parse_number(f[3], "gain_target");
    r.ls = parse_number(f[4], "ls");
    r.lg = parse_number(f[5], "lg");
    r.cx = parse_number(f[6], "cx");
    r.ld = parse_number(f[7], "ld");
    r.qd = parse_number(f[8], "qd");
    r.c1 = parse_number(f[9], "c1");
    r.cp = parse_number(f[10], "cp");
    r.gain_db = parse_optional(f[11], "gain_db");
    r.s11_db = parse_optional(f[12], "s11_db");
    r.s22_db = parse_optional(f[13], "s22_db");
    r.nf_db = parse_optional(f[14], "nf_db");
    r.iip3_dbm = parse_optional(f[15], "iip3_dbm");
    r.status = parse_status(f[16]);
    r.binding = LimitSet::parse(f[17]);
    result.records.push_back(r);
  }
  return result;
}

SweepResult read_json(std::istream& is) {
  ojson j;
  try {
    j = ojson::parse(is);
    SweepResult result;
    const ojson& prov = j.at("provenance");
    result.engine_version = prov.at("engine").get<std::string>();
    result.tech_hash = prov.at("tech_hash").get<std::string>();
    if (!prov.at("plan").is_null()) result.plan = plan_from(prov.at("plan"));
    for (const auto& rj : j.at("records")) result.records.push_back(record_from(rj));
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "json", e.what());
  }
}

void export_result(const SweepResult& result, const std::filesystem::path& path, ExportFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, path.string(), "cannot open " + path.string() + " for writing");
  if (format == ExportFormat::Csv)
    write_csv(os, result);
  else
    write_json(os, result);
  if (!os) throw Error(ErrorCode::IoError, path.string(), "write failed: " + path.string());
}

SweepResult load_result(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, path.string(), "cannot open " + path.string());
  is >> std::ws;
  if (is.peek() == '{') return read_json(is);
  return read_csv(is);
}

void write_library_csv(std::ostream& os, std::span<const InductorSpec> members) {
  os << kLibraryCsvHeader << '\n';
  for (const auto& m : members) {
    os << format_double(m.geometry.nt) << ',' << format_double(m.geometry.od) << ',' << format_double(m.geometry.w)
       << ',' << format_double(m.geometry.s) << ',' << format_double(m.L) << ',' << format_double(m.q_at_f0) << ','
       << format_double(m.r_series) << ',' << format_double(m.r_parallel) << '\n';
  }
}

}  // namespace lnaforge
