#include "asvobs/signal_gen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace asvobs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double draw(std::mt19937_64& rng, const Range& r) { return r.min + (r.max - r.min) * unit_uniform(rng()); }

void check_time(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("signal time must be >= 0");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over a stream-offset seed.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

void ChannelRanges::validate() const {
    for (const Range* r : {&bias, &amplitude, &frequency})
        if (!std::isfinite(r->min) || !std::isfinite(r->max) || r->min > r->max)
            throw InvalidConfig("range must satisfy min <= max");
    if (amplitude.min < 0.0) throw InvalidConfig("amplitude must be >= 0");
    if (!(frequency.min > 0.0)) throw InvalidConfig("frequency must be > 0");
}

double SinusoidChannel::operator()(double t) const {
    return bias + amplitude * std::sin(kTwoPi * frequency * t + phase);
}

SinusoidSpec::SinusoidSpec(std::vector<ChannelRanges> ranges, std::uint64_t seed) : ranges_(std::move(ranges)) {
    std::mt19937_64 rng(seed);
    for (const auto& r : ranges_) {
        r.validate();
        SinusoidChannel c;
        c.bias = draw(rng, r.bias);
        c.amplitude = draw(rng, r.amplitude);
        c.frequency = draw(rng, r.frequency);
        c.phase = kTwoPi * unit_uniform(rng());
        channels_.push_back(c);
    }
}

double SinusoidSpec::sample(std::size_t channel, double t) const {
    check_time(t);
    return channels_.at(channel)(t);
}

std::vector<ChannelRanges> default_control_ranges() {
    return {
        {{0.5, 1.5}, {0.1, 0.5}, {0.01, 0.05}},
        {{-0.05, 0.05}, {0.02, 0.1}, {0.01, 0.05}},
    };
}

std::vector<ChannelRanges> default_disturbance_ranges() {
    return {
        {{-0.05, 0.05}, {0.01, 0.05}, {0.01, 0.05}},
        {{-0.05, 0.05}, {0.01, 0.05}, {0.01, 0.05}},
        {{-0.005, 0.005}, {0.002, 0.01}, {0.01, 0.05}},
    };
}

ControlInput sample_control(double t, const SinusoidSpec& spec) {
    if (spec.channels().size() != 2) throw std::invalid_argument("control spec needs 2 channels");
    return {spec.sample(0, t), spec.sample(1, t)};
}

EnvDisturbance sample_env_disturbance(double t, const SinusoidSpec& spec) {
    if (spec.channels().size() != 3) throw std::invalid_argument("disturbance spec needs 3 channels");
    return {spec.sample(0, t), spec.sample(1, t), spec.sample(2, t)};
}

void NoiseSpec::validate(double dt) const {
    if (!std::isfinite(bound) || bound < 0.0) throw InvalidConfig("noise bound must be >= 0");
    if (!(f_min > 0.0) || !(f_max >= f_min) || !std::isfinite(f_max))
        throw InvalidConfig("noise band must satisfy 0 < f_min <= f_max");
    if (components < 1) throw InvalidConfig("noise needs at least one component");
    if (dt > 0.0 && !(f_max < 0.5 / dt)) throw InvalidConfig("noise band exceeds the Nyquist frequency");
}

GpsNoise::GpsNoise(const NoiseSpec& spec, std::uint64_t seed) : spec_(spec) {
    spec_.validate(0.0);
    std::mt19937_64 rng(seed);
    for (std::size_t axis = 0; axis < 2; ++axis) {
        double sum = 0.0;
        for (int k = 0; k < spec_.components; ++k) {
            SinusoidChannel c;
            c.amplitude = 0.1 + 0.9 * unit_uniform(rng());
            c.frequency = spec_.f_min + (spec_.f_max - spec_.f_min) * unit_uniform(rng());
            c.phase = kTwoPi * unit_uniform(rng());
            sum += c.amplitude;
            axes_[axis].push_back(c);
        }
        norm_[axis] = sum;
    }
}

std::array<double, 2> GpsNoise::operator()(double t) const {
    check_time(t);
    std::array<double, 2> n{0.0, 0.0};
    if (spec_.bound == 0.0) return n;
    for (std::size_t axis = 0; axis < 2; ++axis) {
        double s = 0.0;
        for (const auto& c : axes_[axis]) s += c(t);
        n[axis] = spec_.bound * s / norm_[axis];
    }
    return n;
}

std::array<double, 2> sample_gps_noise(double t, const GpsNoise& noise) { return noise(t); }

}  // namespace asvobs
