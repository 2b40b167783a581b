#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "haartv/wick.hpp"

namespace haartv::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    std::string command;
    std::vector<long long> n_values;
    std::vector<int> p_values;
    std::vector<int> q_values;
    long long samples = 10000;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string output_dir;  // empty = HAARTV_OUTPUT_DIR or "."
    bool plot = false;
    int h = 1;
    int k = 1;
    double x = 1.0;
    double y = 1.0;
    std::uint64_t budget = wick::kDefaultBudget;
    bool phi_ref = false;
    double phi_x = 0.5;
    double phi_y = 0.5;
};

struct RunRecord {
    RunConfig config;
    std::string version = kVersion;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool ok = true;
    double elapsed_seconds = 0.0;
};

// Executes the experiment named by config.command and returns the result rows.
// Row content is a pure function of the config (worker count excluded).
RunRecord run(const RunConfig& config);

// Writes results.csv and manifest.json (plus plot.svg when config.plot) into
// the directory, creating it if needed.
void write_outputs(const RunRecord& record, const std::string& directory);

// Loads a config from a JSON file; accepts either a bare config object or a
// manifest.json (whose "config" member is then used).
RunConfig config_from_json_file(const std::string& path);

std::string resolve_output_dir(const RunConfig& config);

// Locale-independent shortest round-trip formatting.
std::string format_double(double v);

}  // namespace haartv::cli
