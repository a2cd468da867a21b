#pragma once

// Command-line front end. A single binary with subcommands
//
//   split | polar | dual-check | transport | holonomy | duality | stat-report
//
// Every run writes one report (JSON or CSV) that embeds the resolved
// configuration and the tool version. Exit status: 0 success, 1 a checked
// defect exceeded its tolerance, 2 input or module error.

#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

namespace cartan::cli {

inline constexpr std::string_view kToolName = "cartan-dual";
inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kNumericFailure = 1, kInputError = 2 };

enum class Format { json, csv };

/// JSON: the whole report, pretty-printed with sorted keys. CSV: '#' comment
/// lines carrying tool, version and config, then a `key,value` header and one
/// row per scalar under report["results"].
std::string emit_report(const nlohmann::json& report, Format format);

/// Header plus one row per scalar (numbers and booleans) in results, keyed by
/// their path. Numbers use the shortest round-trip form.
std::string results_csv(const nlohmann::json& results);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cartan::cli
