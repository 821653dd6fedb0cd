#pragma once

// Batch driver: key-value run configs, pipeline dispatch, JSON reports and text summaries.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "germlin/json_util.hpp"

namespace germlin::cli {

inline constexpr const char* kVersion = "0.1.0";

enum Exit { kPass = 0, kFail = 1, kInputError = 2 };

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

struct RunConfig {
    std::string command;
    std::string mode = "exact";  // exact | float
    int threads = 0;
    std::uint64_t seed = 1;
    std::string out_path;
    std::map<std::string, std::string> params;  // everything else, values verbatim
    std::map<std::string, std::string> inputs;  // file-valued keys, resolved paths

    bool exact() const { return mode == "exact"; }
    void validate() const;
};

// Lines "key = value"; '#' starts a comment. Keys naming files (spec, bundle, decks,
// perturbation, or any key ending in _file) resolve relative to base_dir and must exist.
RunConfig parse_config(const std::string& text, const std::string& base_dir);
RunConfig load_config(const std::string& path);

struct RunReport {
    json body;
    int exit_code = kPass;
};

RunReport run(const RunConfig& cfg);

// Header "germlin <version> <command>", then one "[PASS|FAIL|INFO] name: detail" line per check.
std::string render_summary(const json& report);

std::string sha256_hex(const std::string& data);

// Full command-line entry point; returns the process exit status.
int cli_main(int argc, char** argv);

}  // namespace germlin::cli
