#include "lnaforge/techcard.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "lnaforge/error.hpp"

namespace lnaforge {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::InconsistentLimits: return "InconsistentLimits";
    case ErrorCode::UnrealizableGeometry: return "UnrealizableGeometry";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::LimitViolation: return "LimitViolation";
    case ErrorCode::ModeUnsupported: return "ModeUnsupported";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

namespace {

struct Field {
  const char* section;
  const char* key;
  std::function<double&(TechnologyCard&)> ref;
};

// Canonical order; serialization and the hash follow it.
const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"general", "f0", [](TechnologyCard& c) -> double& { return c.f0; }},
      {"general", "band_lo", [](TechnologyCard& c) -> double& { return c.band_lo; }},
      {"general", "band_hi", [](TechnologyCard& c) -> double& { return c.band_hi; }},
      {"general", "rs", [](TechnologyCard& c) -> double& { return c.rs; }},
      {"general", "rl", [](TechnologyCard& c) -> double& { return c.rl; }},
      {"general", "vdd", [](TechnologyCard& c) -> double& { return c.vdd; }},
      {"device", "k_gm", [](TechnologyCard& c) -> double& { return c.k_gm; }},
      {"device", "k_cgs", [](TechnologyCard& c) -> double& { return c.k_cgs; }},
      {"device", "n_slope", [](TechnologyCard& c) -> double& { return c.n_slope; }},
      {"device", "i0_spec", [](TechnologyCard& c) -> double& { return c.i0_spec; }},
      {"device", "mob_theta", [](TechnologyCard& c) -> double& { return c.mob_theta; }},
      {"device", "gamma_noise", [](TechnologyCard& c) -> double& { return c.gamma_noise; }},
      {"device", "alpha_noise", [](TechnologyCard& c) -> double& { return c.alpha_noise; }},
      {"device", "cgd_frac", [](TechnologyCard& c) -> double& { return c.cgd_frac; }},
      {"device", "cgb_frac", [](TechnologyCard& c) -> double& { return c.cgb_frac; }},
      {"device", "cas_node_frac", [](TechnologyCard& c) -> double& { return c.cas_node_frac; }},
      {"device", "g_od", [](TechnologyCard& c) -> double& { return c.g_od; }},
      {"passives", "sheet_res", [](TechnologyCard& c) -> double& { return c.sheet_res; }},
      {"passives", "metal_resistivity", [](TechnologyCard& c) -> double& { return c.metal_resistivity; }},
      {"passives", "sub_loss_k", [](TechnologyCard& c) -> double& { return c.sub_loss_k; }},
      {"passives", "cap_density", [](TechnologyCard& c) -> double& { return c.cap_density; }},
      {"limits", "ls_min", [](TechnologyCard& c) -> double& { return c.limits.ls_min; }},
      {"limits", "lg_max", [](TechnologyCard& c) -> double& { return c.limits.lg_max; }},
      {"limits", "cx_min", [](TechnologyCard& c) -> double& { return c.limits.cx_min; }},
      {"limits", "c_max", [](TechnologyCard& c) -> double& { return c.limits.c_max; }},
      {"limits", "nt_min", [](TechnologyCard& c) -> double& { return c.limits.nt.min; }},
      {"limits", "nt_max", [](TechnologyCard& c) -> double& { return c.limits.nt.max; }},
      {"limits", "nt_step", [](TechnologyCard& c) -> double& { return c.limits.nt.step; }},
      {"limits", "od_min", [](TechnologyCard& c) -> double& { return c.limits.od.min; }},
      {"limits", "od_max", [](TechnologyCard& c) -> double& { return c.limits.od.max; }},
      {"limits", "od_step", [](TechnologyCard& c) -> double& { return c.limits.od.step; }},
      {"limits", "w_min", [](TechnologyCard& c) -> double& { return c.limits.w.min; }},
      {"limits", "w_max", [](TechnologyCard& c) -> double& { return c.limits.w.max; }},
      {"limits", "w_step", [](TechnologyCard& c) -> double& { return c.limits.w.step; }},
      {"limits", "s", [](TechnologyCard& c) -> double& { return c.limits.s; }},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(ErrorCode code, const std::string& field, const std::string& msg) {
  throw Error(code, field, std::string(to_string(code)) + ": " + field + ": " + msg);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidValue, name, "must be > 0");
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidValue, name, "must be >= 0");
}

void check_range(const GridRange& r, const char* name) {
  const std::string n(name);
  require_positive(r.min, (n + "_min").c_str());
  require_positive(r.step, (n + "_step").c_str());
  if (r.max < r.min) fail(ErrorCode::InconsistentLimits, n + "_max", "below " + n + "_min");
}

}  // namespace

void TechnologyCard::validate() const {
  require_positive(f0, "f0");
  if (!(band_lo < band_hi)) fail(ErrorCode::InvalidBand, "band_lo", "band_lo must be below band_hi");
  if (!(band_lo < f0 && f0 < band_hi)) fail(ErrorCode::InvalidBand, "f0", "f0 must lie inside (band_lo, band_hi)");
  require_positive(rs, "rs");
  require_positive(rl, "rl");
  require_positive(vdd, "vdd");
  require_positive(k_gm, "k_gm");
  require_positive(k_cgs, "k_cgs");
  require_positive(n_slope, "n_slope");
  require_positive(i0_spec, "i0_spec");
  require_non_negative(mob_theta, "mob_theta");
  require_non_negative(gamma_noise, "gamma_noise");
  require_positive(alpha_noise, "alpha_noise");
  require_non_negative(cgd_frac, "cgd_frac");
  require_non_negative(cgb_frac, "cgb_frac");
  require_non_negative(cas_node_frac, "cas_node_frac");
  require_non_negative(g_od, "g_od");
  require_positive(sheet_res, "sheet_res");
  require_positive(metal_resistivity, "metal_resistivity");
  require_non_negative(sub_loss_k, "sub_loss_k");
  require_positive(cap_density, "cap_density");

  require_non_negative(limits.ls_min, "ls_min");
  require_non_negative(limits.cx_min, "cx_min");
  require_positive(limits.lg_max, "lg_max");
  require_positive(limits.c_max, "c_max");
  if (!(limits.lg_max > limits.ls_min)) fail(ErrorCode::InconsistentLimits, "lg_max", "must exceed ls_min");
  if (!(limits.c_max > limits.cx_min)) fail(ErrorCode::InconsistentLimits, "c_max", "must exceed cx_min");
  check_range(limits.nt, "nt");
  check_range(limits.od, "od");
  check_range(limits.w, "w");
  require_positive(limits.s, "s");
}

TechnologyCard default_card() { return TechnologyCard{}; }

TechnologyCard parse_card(std::string_view text) {
  TechnologyCard card;
  card.name.clear();
  std::set<std::string> seen;
  std::string section;
  std::size_t line_no = 0;
  bool have_name = false;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::ParseError, where, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "general" && section != "device" && section != "passives" && section != "limits")
        fail(ErrorCode::UnknownField, section, "unknown section");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::ParseError, where, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) fail(ErrorCode::ParseError, key, "key outside of a section");

    if (section == "general" && key == "name") {
      if (value.size() < 2 || value.front() != '"' || value.back() != '"')
        fail(ErrorCode::ParseError, "name", "expected a quoted string");
      card.name = std::string(value.substr(1, value.size() - 2));
      have_name = true;
      continue;
    }

    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
      return section == f.section && key == f.key;
    });
    if (it == table.end()) fail(ErrorCode::UnknownField, section + "." + key, "unknown key");
    if (!seen.insert(key).second) fail(ErrorCode::ParseError, key, "duplicate key");

    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || ptr != value.data() + value.size())
      fail(ErrorCode::ParseError, key, "not a number: '" + std::string(value) + "'");
    it->ref(card) = parsed;
  }

  if (!have_name) card.name = "unnamed";
  for (const auto& f : fields()) {
    if (!seen.count(f.key)) fail(ErrorCode::MissingField, std::string(f.section) + "." + f.key, "missing key");
  }
  card.validate();
  return card;
}

TechnologyCard load_card(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, path, "cannot open technology card");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_card(buf.str());
}

std::string serialize_card(const TechnologyCard& card) {
  TechnologyCard copy = card;
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
      if (section == "general") out << "name = \"" << card.name << "\"\n";
    }
    out << f.key << " = " << format_double(f.ref(copy)) << '\n';
  }
  return out.str();
}

void save_card(const TechnologyCard& card, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, path, "cannot write technology card");
  out << serialize_card(card);
}

std::string card_hash(const TechnologyCard& card) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize_card(card)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return hex;
}

}  // namespace lnaforge
