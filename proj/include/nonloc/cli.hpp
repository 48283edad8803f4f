#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nonloc/extension.hpp"

namespace nonloc::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

enum class Format { Json, Table };

struct RunConfig {
    std::string scenario = "ghsz";  // ghsz | hardy | bell | custom
    std::string scenario_file;      // JSON scenario, required for custom
    ExtensionRule rule = ExtensionRule::Seqc;
    std::size_t n_per_context = 1000;
    std::uint64_t seed = 0;
    std::optional<std::array<double, 3>> angles_deg;  // bell only
    std::string out;                                  // empty: stdout
    Format format = Format::Json;
    std::size_t shards = 1;  // execution detail, not echoed in reports

    bool operator==(const RunConfig&) const = default;
};

/// Fills defaults and checks the invariants (n >= 1, angles only for bell).
/// Throws std::invalid_argument.
void normalize(RunConfig& config);

/// TOML-style `key = value` text with a stable key order.
std::string serialize(const RunConfig& config);
/// Parses the text produced by serialize (or written by hand). Throws
/// std::invalid_argument on unknown keys or bad values.
RunConfig parse_config(const std::string& text);

/// Runs one experiment. Returns the report, or throws
/// std::invalid_argument / std::runtime_error on usage or IO problems.
/// `exit_code` receives 0 or 2.
nlohmann::json build_report(const RunConfig& config, int& exit_code);

/// Report without the wall-clock field; the part that must be reproducible.
nlohmann::json report_body(nlohmann::json report);

std::string render(const nlohmann::json& report, Format format);

/// Writes `text` to `path` via a temporary file and rename.
void write_atomically(const std::string& path, const std::string& text);

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

using AngleTriple = std::array<double, 3>;  // degrees

/// One row per grid point. Throws std::invalid_argument on an empty grid.
nlohmann::json sweep(const RunConfig& base, const std::vector<AngleTriple>& grid);
int cmd_sweep(const RunConfig& base, const std::vector<AngleTriple>& grid, std::ostream& out, std::ostream& err);

struct VerifyOptions {
    double tol = 1e-9;
    std::uint64_t seed = 2024;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options);
int cmd_verify(const VerifyOptions& options, std::ostream& out);

}  // namespace nonloc::cli
