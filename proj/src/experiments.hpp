#pragma once

#include <cstdint>
#include <string>

namespace ite {

struct RunOptions {
    std::string out_dir = ".";
    std::uint64_t master_seed = 1;
    int threads = 1;
    bool no_plot = false;
    bool check = false;  // assert result tolerances, not just produce files
};

// Runs one named experiment ("spread", "scaling", "formfactor", "haar-verify",
// "distinguish", "dump-hamiltonian") with a JSON config. Unknown config keys
// are errors. Returns a process exit code: 0 success, 2 config error,
// 3 numeric failure, 4 check-mode assertion failure.
int run_command(const std::string& name, const std::string& config_text,
                const RunOptions& options);

// Default config (JSON text) for a named experiment, used when --config is
// omitted; also documents the schema.
std::string default_config(const std::string& name);

}  // namespace ite
