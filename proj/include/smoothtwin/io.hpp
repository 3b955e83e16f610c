#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "smoothtwin/lattice.hpp"
#include "smoothtwin/search.hpp"
#include "smoothtwin/sqisign.hpp"

namespace smoothtwin {

using Json = nlohmann::ordered_json;

Json factorization_to_json(const SignedFactorization& f);

/// {r, fac_r, fac_r1, B, bits, provenance}; r is a decimal string.
Json twin_to_json(const TwinRecord& rec, std::uint64_t B);
/// Parses and re-verifies a twin line; `B` receives its bound.
TwinRecord twin_from_json(const Json& j, std::uint64_t* B = nullptr);

void write_twins(std::ostream& os, const TwinSet& ts);
std::string twins_to_string(const TwinSet& ts);
/// Reads JSON lines (blank lines skipped). Throws std::invalid_argument with the line number on bad input.
TwinSet read_twins(std::istream& is);
TwinSet read_twins_file(const std::filesystem::path& path);

/// Field names match SearchConfig; unknown keys are rejected.
SearchConfig config_from_json(const Json& j);
Json config_to_json(const SearchConfig& cfg);

Json report_to_json(const AnalysisReport& rep);
Json boost_to_json(const BoostReport& rep);

/// Writes through a temporary file in the same directory and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace smoothtwin
