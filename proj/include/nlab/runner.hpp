#pragma once

#include <map>
#include <string>
#include <vector>

#include "nlab/config.hpp"

namespace nlab {

struct RunOptions {
    unsigned long long seed = 1;
    bool deterministic = false;
    bool force = false;
    int grid_n_override = 0;                  // <= 0 keeps the config value
    std::string mode_override;                // empty keeps the config value
    std::string branch = "both";              // solve
    std::map<std::string, std::string> params;  // subcommand parameters
};

struct RunResult {
    std::string json;                                        // main report
    std::vector<std::pair<std::string, std::string>> tables; // (name, csv)
    int exit_code = 0;                                       // 0 ok, 2 validation
};

// subcommands: validate | constants | fibering | solve | sweep | talenti | gev
RunResult run_subcommand(const std::string& subcommand, ProblemConfig cfg,
                         const RunOptions& opt);

std::map<std::string, std::string> parse_params(const std::string& text);

} // namespace nlab
