// Command-line front end. Links only the C API so it doubles as a smoke test
// of the shared-library surface.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "itelab/itelab.h"

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        std::uint64_t seed, int threads, bool no_plot, bool check) {
    std::string config_text;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            std::fprintf(stderr, "config error: cannot read %s\n", config_path.c_str());
            return 2;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        config_text = ss.str();
    }
    const ite_status status =
        ite_run_command(command.c_str(), config_text.empty() ? nullptr : config_text.c_str(),
                        out_dir.c_str(), seed, threads, no_plot ? 1 : 0, check ? 1 : 0);
    if (status != ITE_OK && ite_last_error()[0] != '\0')
        std::fprintf(stderr, "%s\n", ite_last_error());
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("itelab — spectral equilibration experiments (") + ite_version() +
                 ")"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    bool no_plot = false;
    bool check = false;
    app.add_option("--config", config_path, "JSON config file (omit for defaults)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker-thread cap (results are independent of it)");
    app.add_flag("--no-plot", no_plot, "skip SVG output");
    app.add_flag("--check", check, "assert result tolerances (exit 4 on failure)");

    const char* commands[] = {"spread",      "scaling",     "formfactor",
                              "haar-verify", "distinguish", "dump-hamiltonian"};
    const char* help[] = {
        "escape curves and equilibration times",
        "outcome-variance scaling scans and power-law fits",
        "GUE form-factor analytics vs Monte Carlo",
        "Haar moment closed forms vs explicit contraction",
        "collision-classifier distinguishing experiments",
        "sample one Hamiltonian and write its raw matrix",
    };
    // fallthrough lets the global flags above appear after the subcommand.
    for (int i = 0; i < 6; ++i) app.add_subcommand(commands[i], help[i])->fallthrough();

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    return run(command, config_path, out_dir, seed, threads, no_plot, check);
}
