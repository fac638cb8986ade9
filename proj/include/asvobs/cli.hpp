#pragma once

// Command-line front end: synth, simulate, bench, verify.

#include <iosfwd>
#include <string>
#include <vector>

namespace asvobs {

enum ExitCode : int {
    exit_ok = 0,
    exit_parse = 2,          // bad arguments, config parse error, missing file, unknown key
    exit_infeasible = 3,     // infeasible program or gains/config mismatch
    exit_numerical = 4,      // solver or simulation numerical failure
    exit_certificate = 5,    // a stored or fresh certificate does not verify
};

/// Runs one command. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Bench sweep table: one row per value, means and spreads over seeds 1..n.
/// Keys: delta_psi1, delta_p1, k_omega_p, k_n_p.
struct SweepSpec {
    std::string key;
    std::vector<double> values;
};
/// "KEY=v1,v2,..."; throws ParseError on syntax or an unknown key.
SweepSpec parse_sweep(const std::string& text);

}  // namespace asvobs
