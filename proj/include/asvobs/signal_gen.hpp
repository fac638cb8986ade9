#pragma once

// Seeded excitation signals: random-parameter sinusoids for controls and
// environmental forces, and bounded band-limited GPS noise.

#include <array>
#include <cstdint>
#include <vector>

#include "asvobs/vessel_model.hpp"

namespace asvobs {

struct Range {
    double min = 0.0;
    double max = 0.0;
    friend bool operator==(const Range&, const Range&) = default;
};

struct ChannelRanges {
    Range bias;
    Range amplitude;
    Range frequency;  // Hz
    /// Throws InvalidConfig unless min ≤ max everywhere, amplitude ≥ 0 and frequency > 0.
    void validate() const;
    friend bool operator==(const ChannelRanges&, const ChannelRanges&) = default;
};

/// One realised channel: bias + amplitude·sin(2π·frequency·t + phase).
struct SinusoidChannel {
    double bias = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    [[nodiscard]] double operator()(double t) const;
};

/// Split a user seed into independent per-stream seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
/// Uniform double in [0, 1) from 53 random bits (portable across standard libraries).
double unit_uniform(std::uint64_t bits);

/// Per-channel sinusoid parameters drawn once from `seed`.
class SinusoidSpec {
public:
    SinusoidSpec() = default;
    SinusoidSpec(std::vector<ChannelRanges> ranges, std::uint64_t seed);

    [[nodiscard]] const std::vector<SinusoidChannel>& channels() const { return channels_; }
    [[nodiscard]] const std::vector<ChannelRanges>& ranges() const { return ranges_; }
    [[nodiscard]] double sample(std::size_t channel, double t) const;

private:
    std::vector<ChannelRanges> ranges_;
    std::vector<SinusoidChannel> channels_;
};

/// Channel ranges for [F_u, τ_r].
std::vector<ChannelRanges> default_control_ranges();
/// Channel ranges for [F_wu, F_wv, τ_wr].
std::vector<ChannelRanges> default_disturbance_ranges();

/// Requires two channels (F_u, τ_r). Throws std::invalid_argument for t < 0.
ControlInput sample_control(double t, const SinusoidSpec& spec);
/// Requires three channels (F_wu, F_wv, τ_wr).
EnvDisturbance sample_env_disturbance(double t, const SinusoidSpec& spec);

struct NoiseSpec {
    double bound = 0.2;   // m
    double f_min = 0.1;   // Hz
    double f_max = 0.5;   // Hz
    int components = 8;
    /// Throws InvalidConfig on bound < 0, an empty/inverted band, components < 1,
    /// or f_max at or above the Nyquist frequency of `dt`.
    void validate(double dt) const;
    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

/// Sum-of-sinusoids noise on both GPS axes; |n_i(t)| ≤ bound for all t.
class GpsNoise {
public:
    GpsNoise() = default;
    GpsNoise(const NoiseSpec& spec, std::uint64_t seed);

    [[nodiscard]] std::array<double, 2> operator()(double t) const;
    [[nodiscard]] const NoiseSpec& spec() const { return spec_; }
    [[nodiscard]] const std::array<std::vector<SinusoidChannel>, 2>& components() const { return axes_; }

private:
    NoiseSpec spec_{};
    std::array<std::vector<SinusoidChannel>, 2> axes_;
    std::array<double, 2> norm_{1.0, 1.0};
};

std::array<double, 2> sample_gps_noise(double t, const GpsNoise& noise);

}  // namespace asvobs
