#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lnaforge/explorer.hpp"
#include "lnaforge/inductors.hpp"

namespace lnaforge {

enum class ExportFormat { Csv, Json };

std::optional<ExportFormat> parse_format(std::string_view name);

inline constexpr const char* kSweepCsvHeader =
    "l_ch,w1,id,gain_target,ls,lg,cx,ld,qd,c1,cp,gain_db,s11_db,s22_db,nf_db,iip3_dbm,status,binding";
inline constexpr const char* kLibraryCsvHeader = "nt,od,w,s,L,Q,r_series,r_parallel";

void write_csv(std::ostream& os, const SweepResult& result);
void write_json(std::ostream& os, const SweepResult& result);
std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result);

/// CSV carries no provenance or detail block; those come back empty.
SweepResult read_csv(std::istream& is);
SweepResult read_json(std::istream& is);

void export_result(const SweepResult& result, const std::filesystem::path& path, ExportFormat format);
/// Picks the parser from the first non-blank character ('{' means JSON).
SweepResult load_result(const std::filesystem::path& path);

void write_library_csv(std::ostream& os, std::span<const InductorSpec> members);

}  // namespace lnaforge
