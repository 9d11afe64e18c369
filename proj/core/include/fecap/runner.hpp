#ifndef FECAP_RUNNER_HPP
#define FECAP_RUNNER_HPP

#include <string>

#include "fecap/config.hpp"

namespace fecap {

inline constexpr const char* version_string = "0.1.0";

struct RunFlags {
    std::string out_dir; // empty: use config [output] dir
    bool force = false;  // overwrite an existing run directory
    int jobs = 0;        // sweep worker count; 0 = hardware concurrency
    std::string fit_input;        // `fit` subcommand: input CSV path
    std::string fit_units = "auto"; // auto | C/m2 | uC/cm2
};

// Executes one subcommand (landscape, pund, kinetics, retention, endurance,
// sweep, fit), writing CSV/JSON outputs plus a manifest into the run
// directory.  Returns 0 on success, 1 on configuration errors, 2 on
// numerical failures.  Partial outputs are removed on failure.
int run_subcommand(const std::string& name, const RunConfig& config,
                   const RunFlags& flags);

} // namespace fecap

#endif
