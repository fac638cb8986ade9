#pragma once

// Scenario runner and error statistics for the cascade observer.

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asvobs/observers.hpp"
#include "asvobs/signal_gen.hpp"

namespace asvobs {

enum class PlantKind {
    Full,       // nonlinear kinetics, σ from C(ν), D(ν) and τ_w
    Surrogate,  // ν̇ = M⁻¹τ + σ with σ(t) = M⁻¹τ_w(t) prescribed
};

enum class MeasurementMode {
    Sampled,     // y taken once per dt and held over the observer step
    Continuous,  // plant and observer integrated as one system, y evaluated at every RK4 stage
};

struct ScenarioConfig {
    double duration = 300.0;
    double dt = 0.01;
    double warmup = 50.0;
    PlantKind plant = PlantKind::Full;
    MeasurementMode measurement = MeasurementMode::Continuous;
    std::uint64_t seed = 1;
    NoiseSpec noise{0.0};  // noiseless unless a bound is set
    std::vector<ChannelRanges> control = default_control_ranges();
    std::vector<ChannelRanges> disturbance = default_disturbance_ranges();
    VesselParams vessel;
    SynthesisConfig synthesis;
    Pose eta0{0.0, 10.0, 0.0};
    BodyVelocity nu0;

    /// Throws InvalidConfig.
    void validate() const;
    [[nodiscard]] std::size_t steps() const;
};

/// Default protocol without GPS noise (k_ω = 1, k_n = 0, δ = 0.05).
ScenarioConfig noiseless_scenario();
/// ±0.2 m GPS noise, k_ω = k_n = 1, δ_ψ = δ_p = 1.2.
ScenarioConfig noisy_scenario();

struct RunRow {
    double t;
    Pose eta;
    BodyVelocity nu;
    LumpedDisturbance sigma;
    Measurement y;
    ObserverEstimates est;
};

struct RunRecord {
    std::vector<RunRow> rows;
    double max_omega = 0.0;    // max ‖Δσ/Δt‖ over the run
    double max_noise = 0.0;    // max ‖n_p‖_∞, the per-axis GPS bound
    double max_noise_2 = 0.0;  // max ‖n_p‖₂, the norm entering the ISS bound
    int observer_substeps = 1;
};

/// Synthesises gains for config.synthesis, then runs. Throws Infeasible,
/// NumericalFailure, DivergedRun.
RunRecord run_scenario(const ScenarioConfig& config);
/// Runs with precomputed gains (not checked against config.synthesis).
RunRecord run_scenario(const ScenarioConfig& config, const ObserverGains& gains);

enum class Channel { u, v, r, sigma_u, sigma_v, sigma_r };
inline constexpr Channel all_channels[] = {Channel::u, Channel::v, Channel::r,
                                           Channel::sigma_u, Channel::sigma_v, Channel::sigma_r};
const char* channel_name(Channel c);

struct ErrorStats {
    double u = 0.0, v = 0.0, r = 0.0;
    double sigma_u = 0.0, sigma_v = 0.0, sigma_r = 0.0;
    [[nodiscard]] double get(Channel c) const;
    double& get(Channel c);
    friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

/// truth − estimate for rows with t ≥ warmup.
std::vector<double> error_series(const RunRecord& rec, Channel c, double warmup);
/// Estimate only, rows with t ≥ warmup.
std::vector<double> estimate_series(const RunRecord& rec, Channel c, double warmup);

/// Population standard deviation of each error channel over t ≥ warmup. Throws EmptyWindow.
ErrorStats error_std(const RunRecord& rec, double warmup);
/// Population standard deviation; throws EmptyWindow on empty input.
double population_std(std::span<const double> x);

/// Frequency-band diagnostics with a Hann window: RMS of e_v in [0, 0.05] Hz and of
/// v̂ in [0.1, 0.5] Hz.
struct BandStats {
    double e_v_low = 0.0;
    double v_hat_mid = 0.0;
    friend bool operator==(const BandStats&, const BandStats&) = default;
};
inline constexpr double low_band_hi = 0.05;
inline constexpr double mid_band_lo = 0.1;
inline constexpr double mid_band_hi = 0.5;

/// Over rows with t ≥ warmup; dt is the sample spacing. Throws EmptyWindow.
BandStats band_stats(const RunRecord& rec, double warmup, double dt);

struct RunFailed : std::runtime_error {
    RunFailed(std::uint64_t s, const std::string& what, std::exception_ptr c)
        : std::runtime_error("seed " + std::to_string(s) + ": " + what), seed(s), cause(std::move(c)) {}
    std::uint64_t seed;
    std::exception_ptr cause;
};

struct MonteCarloStats {
    std::vector<std::uint64_t> seeds;  // ascending
    std::vector<ErrorStats> per_seed;  // aligned with seeds
    ErrorStats mean;
    ErrorStats spread;  // population std across seeds
    std::vector<BandStats> per_seed_band;
    BandStats mean_band;
};

/// Seeds 1..n_seeds.
MonteCarloStats monte_carlo(const ScenarioConfig& config, std::size_t n_seeds);
/// Runs the given seeds in parallel; the result does not depend on their order.
/// Gains are synthesised once. Throws RunFailed naming the smallest failing seed.
MonteCarloStats monte_carlo(const ScenarioConfig& config, std::vector<std::uint64_t> seeds,
                            const std::optional<ObserverGains>& gains = std::nullopt);

inline constexpr const char* csv_header =
    "t,x,y,psi,u,v,r,sigma_u,sigma_v,sigma_r,y_x,y_y,y_psi,x_hat,y_hat,psi_hat,u_hat,v_hat,r_hat,"
    "sigma_u_hat,sigma_v_hat,sigma_r_hat";

/// Header plus one row per step, %.17g; headings wrapped to (−π, π].
void write_csv(std::ostream& os, const RunRecord& rec);
/// Throws IoError.
void export_csv(const RunRecord& rec, const std::string& path);

}  // namespace asvobs
