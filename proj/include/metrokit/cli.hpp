#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace metrokit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 success, 2 config/schema violation, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

/// Validated run configuration.
struct RunConfig {
    std::string command;
    nlohmann::json parameters;
    std::uint64_t seed = 0;
    std::string output_dir;
    int jobs = 1;
    bool dry_run = false;

    /// Parses and schema-validates; unknown keys are rejected.
    static RunConfig from_json(const nlohmann::json& j);
};

/// FNV-1a hash of the canonical config serialization.
std::string config_hash(const nlohmann::json& canonical);

/// Executes the configured pipeline, writing result.json, table.csv and
/// manifest.json under the output directory. Returns an exit code.
int run(const RunConfig& config);

/// Full front end: parses argv, loads the config file, applies overrides.
int main_entry(int argc, char** argv);

}  // namespace metrokit::cli
