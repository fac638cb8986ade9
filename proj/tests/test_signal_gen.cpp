#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "asvobs/signal_gen.hpp"
#include "asvobs/spectral.hpp"

using namespace asvobs;

TEST(Sinusoid, ConstantWhenAmplitudeZero) {
    const SinusoidSpec spec({{{1, 1}, {0, 0}, {0.02, 0.02}}, {{0, 0}, {0, 0}, {0.02, 0.02}}}, 7);
    for (double t : {0.0, 1.3, 250.0}) {
        const ControlInput c = sample_control(t, spec);
        EXPECT_EQ(c.F_u, 1.0);
        EXPECT_EQ(c.tau_r, 0.0);
    }
}

TEST(Sinusoid, Deterministic) {
    const SinusoidSpec a(default_control_ranges(), 42);
    const SinusoidSpec b(default_control_ranges(), 42);
    const SinusoidSpec c(default_control_ranges(), 43);
    for (double t : {0.0, 3.7, 123.45}) {
        EXPECT_EQ(sample_control(t, a).F_u, sample_control(t, b).F_u);
        EXPECT_EQ(sample_control(t, a).tau_r, sample_control(t, a).tau_r);
    }
    EXPECT_NE(sample_control(3.7, a).F_u, sample_control(3.7, c).F_u);
}

TEST(Sinusoid, DrawsWithinRanges) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const SinusoidSpec s(default_control_ranges(), seed);
        for (std::size_t ch = 0; ch < 2; ++ch) {
            const auto& r = s.ranges()[ch];
            const auto& c = s.channels()[ch];
            EXPECT_GE(c.bias, r.bias.min);
            EXPECT_LE(c.bias, r.bias.max);
            EXPECT_GE(c.amplitude, r.amplitude.min);
            EXPECT_LE(c.amplitude, r.amplitude.max);
            EXPECT_GE(c.frequency, r.frequency.min);
            EXPECT_LE(c.frequency, r.frequency.max);
        }
    }
}

TEST(Sinusoid, Validation) {
    EXPECT_THROW(SinusoidSpec({{{1, 0}, {0, 0}, {0.1, 0.1}}}, 1), InvalidConfig);
    EXPECT_THROW(SinusoidSpec({{{0, 0}, {0, 0}, {0.0, 0.1}}}, 1), InvalidConfig);
    EXPECT_THROW(SinusoidSpec({{{0, 0}, {-1, 0}, {0.1, 0.1}}}, 1), InvalidConfig);
    const SinusoidSpec s(default_control_ranges(), 1);
    EXPECT_THROW(sample_control(-1.0, s), std::invalid_argument);
    EXPECT_THROW(sample_env_disturbance(1.0, s), std::invalid_argument);
}

TEST(EnvDisturbance, ZeroAndDeterministic) {
    const ChannelRanges zero{{0, 0}, {0, 0}, {0.01, 0.01}};
    const SinusoidSpec z({zero, zero, zero}, 5);
    const EnvDisturbance w = sample_env_disturbance(12.0, z);
    EXPECT_EQ(w.F_wu, 0.0);
    EXPECT_EQ(w.F_wv, 0.0);
    EXPECT_EQ(w.tau_wr, 0.0);
    const SinusoidSpec a(default_disturbance_ranges(), 9), b(default_disturbance_ranges(), 9);
    EXPECT_EQ(sample_env_disturbance(77.0, a).F_wv, sample_env_disturbance(77.0, b).F_wv);
}

TEST(GpsNoiseTest, ZeroBound) {
    NoiseSpec spec;
    spec.bound = 0.0;
    const GpsNoise n(spec, 3);
    for (double t : {0.0, 1.0, 17.3}) {
        EXPECT_EQ(n(t)[0], 0.0);
        EXPECT_EQ(n(t)[1], 0.0);
    }
}

TEST(GpsNoiseTest, BoundHoldsOverAMillionSamples) {
    const GpsNoise n(NoiseSpec{}, 4);
    double mx = 0.0;
    for (int k = 0; k < 1000000; ++k) {
        const auto v = sample_gps_noise(k * 0.01, n);
        mx = std::max({mx, std::abs(v[0]), std::abs(v[1])});
    }
    EXPECT_LE(mx, 0.2);
    EXPECT_GT(mx, 0.05);
}

TEST(GpsNoiseTest, EnergyConcentratedInBand) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const GpsNoise n(NoiseSpec{}, seed);
        std::vector<double> x;
        const double dt = 0.01;
        for (int k = 0; k < 100000; ++k) x.push_back(n(k * dt)[0]);
        EXPECT_GE(band_energy_fraction(x, dt, 0.1, 0.5), 0.95) << seed;
    }
}

TEST(GpsNoiseTest, DeterministicAndValidated) {
    const GpsNoise a(NoiseSpec{}, 11), b(NoiseSpec{}, 11);
    EXPECT_EQ(a(5.5), b(5.5));
    NoiseSpec bad;
    bad.f_max = 60.0;
    EXPECT_THROW(bad.validate(0.01), InvalidConfig);
    bad = {};
    bad.components = 0;
    EXPECT_THROW(GpsNoise(bad, 1), InvalidConfig);
    bad = {};
    bad.f_min = 0.6;
    EXPECT_THROW(GpsNoise(bad, 1), InvalidConfig);
}

TEST(Spectral, SineBandRms) {
    std::vector<double> x;
    const double dt = 0.01;
    for (int k = 0; k < 10000; ++k) x.push_back(2.0 * std::sin(2 * std::numbers::pi * 1.0 * k * dt) + 0.5);
    EXPECT_NEAR(band_rms(x, dt, 0.9, 1.1), 2.0 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(band_rms(x, dt, 0.0, 0.0), 0.5, 1e-10);
    EXPECT_NEAR(band_rms(x, dt, 2.0, 50.0), 0.0, 1e-10);
    EXPECT_THROW(band_rms(std::vector<double>{}, dt, 0, 1), EmptyWindow);
}

TEST(Seeds, DeriveSeedSeparatesStreams) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
    EXPECT_LT(unit_uniform(~0ULL), 1.0);
    EXPECT_EQ(unit_uniform(0), 0.0);
}
