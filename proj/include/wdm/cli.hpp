#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wdm/simulation.hpp"

namespace wdm {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitRuntime = 3 };

/// Bad command line: unknown flag, missing required value, malformed number.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::filesystem::path topology;
    std::filesystem::path traffic;
    /// Defaults to default_sidecar_path(traffic) when that file exists.
    std::optional<std::filesystem::path> traffic_models;
    int k = kDefaultKsp;
    std::uint64_t seed = 1;
    int hours = 24;
    bool fda_enabled = true;
    double fda_tol = kDefaultFdaTolerance;
    int fda_max_passes = kDefaultFdaMaxPasses;
    double fda_period_s = 3600.0;
    std::filesystem::path out_dir = "out";
    double mean_holding_s = 300.0;
    /// Overrides the topology document's lightpath_capacity_gbps.
    std::optional<double> lightpath_capacity_gbps;
    double hourly_floor = kDefaultHourlyFloor;
    long long full_audit_every = 10000;
    bool trace = true;
    bool force_trace = false;
};

/// Reads a JSON run-config file. Relative paths resolve against `base_dir`.
/// Unknown keys are rejected with ValidationError.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
nlohmann::ordered_json to_json(const RunConfig& config);

/// Throws ValidationError for out-of-range values or missing input files.
void validate(const RunConfig& config);

SimulationOptions simulation_options(const RunConfig& config);

struct CliCommand {
    std::string name; // run | validate | ksp | delay | help
    std::string help_text;
    RunConfig config;
    // ksp
    NodeId src = 0;
    NodeId dst = 0;
    // delay
    std::filesystem::path state;
};

/// Parses arguments (without the program name). A --config file is read
/// first and explicit flags override its values. Throws UsageError, or
/// ValidationError for values that parse but are out of range.
CliCommand parse_cli(const std::vector<std::string>& args);

/// Full entry point: parse, execute, report. Returns an ExitCode value.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wdm
