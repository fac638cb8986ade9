#pragma once

// Sectioned key=value run configuration:
//
//   [vessel]     m, I_z, x_g, X_udot, ..., N_rr        (VesselParams field names)
//   [synthesis]  delta_psi1, delta_p1, k_omega_p, k_n_p, r_min, r_max, p_min, gain_reg, eps_feas
//   [signals]    <channel>.<bias|amplitude|frequency> = min, max   (or a single value)
//                channels F_u, tau_r (control) and F_wu, F_wv, tau_wr (environment)
//   [noise]      bound, f_min, f_max, components
//   [scenario]   duration, dt, warmup, plant (full|surrogate), measurement (continuous|sampled),
//                seed, x0, y0, psi0, u0, v0, r0
//
// '#' and ';' start comments. Omitted keys keep the noiseless defaults. The
// synthesis inertia matrix always follows [vessel].

#include <iosfwd>
#include <string>

#include "asvobs/bench_harness.hpp"

namespace asvobs {

/// Throws ParseError (with line number) on syntax errors, unknown sections or keys,
/// duplicates and bad values; InvalidConfig / NotPositiveDefinite when the result
/// breaks a module invariant.
ScenarioConfig parse_config(std::istream& is);
/// Throws IoError when the file cannot be opened.
ScenarioConfig read_config_file(const std::string& path);

/// Every key, %.17g; parse_config(write_config(c)) == c.
void write_config(std::ostream& os, const ScenarioConfig& c);

}  // namespace asvobs
