#pragma once

// Configuration-driven experiment runner. Stages execute in dependency
// order; report.json is byte-stable for a fixed config and seed, while
// wall-clock timings go to a separate timing.json.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndattr/attractors.hpp"
#include "ndattr/config.hpp"
#include "ndattr/dimension.hpp"
#include "ndattr/errors.hpp"

namespace ndattr {

inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    Json data = Json::object();
    Json timing = Json::object();
    std::vector<CheckResult> checks;
    ErrorCode status = ErrorCode::Ok;
    std::string error;

    [[nodiscard]] bool all_checks_pass() const;
    /// 0 when every check passed, the error code of a failed stage, or 5
    /// when a check failed.
    [[nodiscard]] int exit_code() const;
    [[nodiscard]] const CheckResult* find_check(const std::string& name) const;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<double> tolerance;
    std::optional<std::vector<std::string>> stages;
};

/// Output directory: --out, else the config's output key, else
/// $NDATTR_OUT/<scenario>, else out/<scenario>.
[[nodiscard]] std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const RunOverrides& ov);

/// Runs the requested stages and writes artifacts under out_dir. Stage
/// errors are captured in the report rather than thrown; configuration
/// errors (unknown keys, missing dependency stage) are thrown.
[[nodiscard]] RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
[[nodiscard]] RunReport run_experiment(const std::filesystem::path& config_path, const RunOverrides& ov = {});

/// report.json and timing.json.
void write_report(const RunReport& report, const std::filesystem::path& out_dir);

/// Plain CSVs for plotting: (-log r, log N) per dimension report,
/// (t, dist, envelope) per semicontinuity side and (n, measured, envelope)
/// per attraction check. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const RunReport& report, const std::filesystem::path& dir);

[[nodiscard]] Json to_json(const DimensionReport& rep);
[[nodiscard]] Json to_json(const CoverResult& cover);
[[nodiscard]] Json to_json(const DecayFit& fit);
[[nodiscard]] Json to_json(const AttractionReport& rep);

}  // namespace ndattr
