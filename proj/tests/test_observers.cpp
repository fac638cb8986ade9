#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "asvobs/bench_harness.hpp"
#include "asvobs/observer_model.hpp"
#include "asvobs/observers.hpp"

using namespace asvobs;

namespace {

const VesselModel& vessel() {
    static const VesselModel v;
    return v;
}

const ObserverGains& default_gains() {
    static const ObserverGains g = synthesize_all(SynthesisConfig{}).gains;
    return g;
}

Vector random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Gains placing every closed-loop pole at −1: (s + 1)³ per axis.
ObserverGains unit_pole_gains() {
    ObserverGains g;
    g.rot.P = SymMatrix::identity(3);
    g.rot.W = {-3.0, -3.0, -1.0};
    g.rot.L = extract_rotational_gain(g.rot);
    g.pos.P = SymMatrix::identity(6);
    g.pos.W = Matrix{{-3, 0}, {0, -3}, {-3, 0}, {0, -3}, {-1, 0}, {0, -1}};
    g.config.r_min = g.config.r_max = 0.0;
    return g;
}

// True subsystem rates with σ̇ = ω.
Vector rotational_truth_rate(std::span<const double> chi, const ControlInput& tau, double omega) {
    const Vector bt = model::B_psi(vessel().M_inv()) * to_vector(tau);
    const Vector ax = model::A_psi() * chi;
    return {ax[0] + bt[0], ax[1] + bt[1], ax[2] + bt[2] + omega};
}

Vector positional_truth_rate(std::span<const double> chi, double psi, const ControlInput& tau,
                             std::span<const double> omega) {
    Vector d = add(model::A_p(psi) * chi, model::B_p(vessel().M_inv()) * to_vector(tau));
    d[4] += omega[0];
    d[5] += omega[1];
    return d;
}

}  // namespace

TEST(RotationalObserver, ExactEstimateHasZeroErrorRate) {
    std::mt19937_64 rng(1);
    const Vector L = default_gains().rot.L;
    for (int k = 0; k < 20; ++k) {
        const Vector chi = random_vec(rng, 3);
        const ControlInput tau{random_vec(rng, 1)[0], random_vec(rng, 1)[0]};
        const Vector est = rotational_derivative(chi, chi[0], tau, L, vessel().M_inv());
        const Vector truth = rotational_truth_rate(chi, tau, 0.0);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(est[i], truth[i], 1e-12 * (1 + std::abs(truth[i])));
    }
}

TEST(RotationalObserver, ZeroGainIsOpenLoopShift) {
    const Vector rate = rotational_derivative(Vector{0.3, -0.2, 0.05}, 7.0, {}, Vector(3), vessel().M_inv());
    EXPECT_EQ(rate, (Vector{-0.2, 0.05, 0.0}));
}

TEST(RotationalObserver, ErrorDynamicsIdentity) {
    std::mt19937_64 rng(2);
    const RotationalSolution& sol = default_gains().rot;
    const Matrix acl = model::A_psi() - Matrix::column(sol.L) * model::C_psi();
    for (int k = 0; k < 50; ++k) {
        const Vector chi = random_vec(rng, 3), chi_hat = random_vec(rng, 3);
        const ControlInput tau{random_vec(rng, 1)[0], random_vec(rng, 1)[0]};
        const double omega = random_vec(rng, 1)[0];
        const Vector lhs = sub(rotational_truth_rate(chi, tau, omega),
                               rotational_derivative(chi_hat, chi[0], tau, sol.L, vessel().M_inv()));
        Vector rhs = acl * sub(chi, chi_hat);
        rhs[2] += omega;
        // Also the LMI form A_ψ + P⁻¹W C_ψ.
        const Vector rhs2 = add(rotational_error_matrix(sol) * sub(chi, chi_hat), Vector{0, 0, omega});
        const double scale = 1.0 + norm_inf(sol.L);
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * scale);
            EXPECT_NEAR(lhs[i], rhs2[i], 1e-12 * scale);
        }
    }
}

TEST(PositionalObserver, ExactEstimateHasZeroErrorRate) {
    std::mt19937_64 rng(3);
    const PositionalSolution& sol = default_gains().pos;
    for (int k = 0; k < 20; ++k) {
        const Vector chi = random_vec(rng, 6);
        const double psi = random_vec(rng, 1, 4.0)[0];
        const ControlInput tau{random_vec(rng, 1)[0], random_vec(rng, 1)[0]};
        const PositionalEstimate est = positional_from(chi);
        const Vector rate = to_vector(positional_derivative(est, {chi[0], chi[1]}, psi, tau, sol, vessel().M_inv()));
        const Vector truth = positional_truth_rate(chi, psi, tau, Vector{0, 0});
        for (int i = 0; i < 6; ++i) EXPECT_NEAR(rate[i], truth[i], 1e-12 * (1 + std::abs(truth[i])));
    }
}

TEST(PositionalObserver, ZeroHeadingIsLinearObserver) {
    std::mt19937_64 rng(4);
    const PositionalSolution& sol = default_gains().pos;
    const Matrix L = solve_linear(sol.P.matrix(), sol.W) * -1.0;
    const Vector x = random_vec(rng, 6), y = random_vec(rng, 2);
    const ControlInput tau{0.7, -0.1};
    const Vector rate = positional_derivative(x, {y[0], y[1]}, 0.0, tau, positional_gain_z(sol), vessel().M_inv());
    const Vector expected = add(add(model::A_p(0.0) * x, model::B_p(vessel().M_inv()) * to_vector(tau)),
                                L * sub(y, model::C_p() * x));
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(rate[i], expected[i], 1e-10 * (1 + L.max_abs()));
}

TEST(PositionalObserver, ErrorDynamicsIdentity) {
    std::mt19937_64 rng(5);
    const PositionalSolution& sol = default_gains().pos;
    const Matrix lz = positional_gain_z(sol);
    for (int k = 0; k < 50; ++k) {
        const Vector chi = random_vec(rng, 6), chi_hat = random_vec(rng, 6);
        const Vector omega = random_vec(rng, 2), n = random_vec(rng, 2, 0.2);
        const double psi = random_vec(rng, 1, 10.0)[0];
        const ControlInput tau{random_vec(rng, 1)[0], random_vec(rng, 1)[0]};
        const std::array<double, 2> y{chi[0] + n[0], chi[1] + n[1]};
        const Vector lhs = sub(positional_truth_rate(chi, psi, tau, omega),
                               positional_derivative(chi_hat, y, psi, tau, lz, vessel().M_inv()));
        // (A_p(ψ) − L_p(ψ)C_p)e + B_ω ω − L_p(ψ)n with the gain from its closed form.
        const Matrix Lp = positional_gain(sol, psi);
        const Vector e = sub(chi, chi_hat);
        Vector rhs = sub((model::A_p(psi) - Lp * model::C_p()) * e, Lp * n);
        rhs = add(rhs, model::B_omega_p() * omega);
        for (int i = 0; i < 6; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * (1 + lz.max_abs()));
    }
}

TEST(PositionalObserver, SpectrumDoesNotDependOnHeading) {
    const PositionalSolution& sol = default_gains().pos;
    auto sorted = [](std::vector<std::complex<double>> v) {
        std::sort(v.begin(), v.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
        return v;
    };
    const auto ref = sorted(general_eigenvalues(positional_error_matrix(sol, 0.0)));
    for (int k = 0; k < 36; ++k) {
        const double psi = -std::numbers::pi + k * std::numbers::pi / 18.0;
        const Matrix frozen = model::A_p(psi) - positional_gain(sol, psi) * model::C_p();
        const auto ev = sorted(general_eigenvalues(frozen));
        ASSERT_EQ(ev.size(), ref.size());
        for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_LE(std::abs(ev[i] - ref[i]), 1e-6 * std::abs(ref[i])) << psi;
    }
}

TEST(CascadeObserver, ZeroFixedPointAndDeterminism) {
    const CascadeObserver obs(default_gains(), vessel().M_inv());
    const ObserverEstimates zero;
    EXPECT_EQ(observer_step(zero, {}, {}, obs, 0.01), zero);
    const ObserverEstimates a = obs.step(zero, {0.3, 10.1, 0.02}, {1.0, 0.01}, 0.01);
    const ObserverEstimates b = obs.step(zero, {0.3, 10.1, 0.02}, {1.0, 0.01}, 0.01);
    EXPECT_EQ(a, b);
    EXPECT_THROW((void)obs.step(zero, {}, {}, 0.0), std::invalid_argument);
    const Measurement bad{std::nan(""), 0.0, 0.0};
    EXPECT_THROW((void)obs.step(zero, bad, {}, 0.01), NonFinite);
}

TEST(CascadeObserver, SubstepsFollowPoleRadius) {
    const CascadeObserver slow(unit_pole_gains(), vessel().M_inv());
    EXPECT_NEAR(slow.pole_radius(), 1.0, 1e-4);
    EXPECT_EQ(slow.substeps(0.01), 1);
    SynthesisConfig c;
    c.delta_psi1 = 300.0;
    const CascadeObserver fast(synthesize_all(c).gains, vessel().M_inv());
    EXPECT_GE(fast.pole_radius(), 300.0);
    EXPECT_EQ(fast.substeps(0.01), static_cast<int>(std::ceil(0.01 * fast.pole_radius())));
}

TEST(CascadeObserver, FourthOrderConvergence) {
    const CascadeObserver obs(unit_pole_gains(), vessel().M_inv());
    const Measurement y{1.0, -2.0, 0.4};
    const ControlInput tau{0.5, 0.02};
    auto run = [&](int n) {
        ObserverEstimates e;
        for (int i = 0; i < n; ++i) e = obs.step(e, y, tau, 2.0 / n);
        Vector v = to_vector(e.rot), p = to_vector(e.pos);
        v.insert(v.end(), p.begin(), p.end());
        return v;
    };
    const Vector ref = run(4096);
    double prev = 0.0;
    for (int n : {8, 16, 32, 64}) {
        const double err = norm_inf(sub(run(n), ref));
        if (prev > 0.0) {
            EXPECT_GT(prev / err, 12.0) << n;
            EXPECT_LT(prev / err, 20.0) << n;
        }
        prev = err;
    }
}

TEST(EstimationErrors, Basics) {
    const Pose eta{1.0, 2.0, 0.0};
    const BodyVelocity nu{0.5, -0.1, 0.02};
    const LumpedDisturbance s{0.01, 0.02, 0.003};
    ObserverEstimates exact{{0.0, 0.02, 0.003}, {1.0, 2.0, 0.5, -0.1, 0.01, 0.02}};
    const EstimationError z = estimation_errors(eta, nu, s, exact);
    EXPECT_EQ(z.e_psi, Vector(3));
    EXPECT_EQ(z.e_p, Vector(6));
    ObserverEstimates zero;
    const EstimationError e0 = estimation_errors(eta, nu, s, zero);
    EXPECT_EQ(e0.z_p, e0.e_p);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 100; ++k) {
        const Vector t = random_vec(rng, 6, 5.0);
        const Pose p{t[0], t[1], random_vec(rng, 1, 10.0)[0]};
        const EstimationError e = estimation_errors(p, {t[2], t[3], 0}, {t[4], t[5], 0}, zero);
        EXPECT_NEAR(norm2(e.z_p), norm2(e.e_p), 1e-13 * norm2(e.e_p));
        EXPECT_EQ(e.z_p, model::T_p(p.psi) * e.e_p);
    }
}

TEST(Convergence, TransformedErrorMatchesDirectIntegration) {
    // Surrogate truth and observer integrated together, against ż = (A_0 + rS_T + L_zC)z + B_ωω + L_zR₂ᵀn.
    const PositionalSolution& sol = default_gains().pos;
    const Matrix lz = positional_gain_z(sol);
    const Matrix& Mi = vessel().M_inv();
    auto r_of = [](double t) { return 0.3 * std::sin(0.1 * t); };
    auto psi_of = [](double t) { return 3.0 * (1.0 - std::cos(0.1 * t)); };
    auto sigma_of = [](double t) { return Vector{0.02 * std::sin(0.05 * t), 0.01 * std::cos(0.07 * t)}; };
    auto omega_of = [](double t) { return Vector{0.001 * std::cos(0.05 * t), -0.0007 * std::sin(0.07 * t)}; };
    auto noise_of = [](double t) { return Vector{0.1 * std::sin(1.3 * t), 0.1 * std::cos(2.1 * t)}; };
    const ControlInput tau{0.8, 0.0};
    // state: χ_p (6), χ̂_p (6), z (6)
    auto f = [&](double t, const Vector& s) {
        const double psi = psi_of(t);
        Vector chi(s.begin(), s.begin() + 6);
        const Vector sig = sigma_of(t);
        chi[4] = sig[0];
        chi[5] = sig[1];
        Vector d = positional_truth_rate(chi, psi, tau, omega_of(t));
        const Vector n = noise_of(t);
        const Vector hat = positional_derivative(std::span(s).subspan(6, 6), {chi[0] + n[0], chi[1] + n[1]}, psi,
                                                 tau, lz, Mi);
        const Vector z(s.begin() + 12, s.end());
        Vector dz = add((model::A0_p() + model::S_Tp() * r_of(t) + lz * model::C_p()) * z,
                        model::B_omega_p() * omega_of(t));
        dz = add(dz, lz * (rotation2(psi).transpose() * n));
        d.insert(d.end(), hat.begin(), hat.end());
        d.insert(d.end(), dz.begin(), dz.end());
        return d;
    };
    Vector s(18);
    s[1] = 10.0;
    const Vector sig0 = sigma_of(0);
    s[4] = sig0[0];
    s[5] = sig0[1];
    for (int i = 0; i < 6; ++i) s[12 + i] = (model::T_p(psi_of(0)) * Vector(s.begin(), s.begin() + 6))[i];
    const double h = 2.5e-4;  // the two routes differ by RK4 truncation, O(h⁴)
    const int steps = static_cast<int>(std::lround(100.0 / h));
    const int every = static_cast<int>(std::lround(1.0 / h));
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
        s = rk4_step(f, s, k * h, h);
        if ((k + 1) % every == 0) {
            const double t = (k + 1) * h;
            Vector chi(s.begin(), s.begin() + 6);
            const Vector sig = sigma_of(t);
            chi[4] = sig[0];
            chi[5] = sig[1];
            const Vector e = sub(chi, Vector(s.begin() + 6, s.begin() + 12));
            const Vector z = model::T_p(psi_of(t)) * e;
            worst = std::max(worst, norm_inf(sub(z, Vector(s.begin() + 12, s.end()))));
        }
    }
    EXPECT_LE(worst, 1e-8);
}

namespace {

// Surrogate run with zero control, constant σ and no noise.
RunRecord constant_sigma_run(double delta, double duration) {
    ScenarioConfig c;
    c.plant = PlantKind::Surrogate;
    c.duration = duration;
    c.warmup = 0.0;
    c.synthesis.delta_psi1 = c.synthesis.delta_p1 = delta;
    for (auto& ch : c.control) ch = {{0, 0}, {0, 0}, {0.01, 0.01}};
    c.disturbance = {{{0.5, 0.5}, {0, 0}, {0.01, 0.01}},
                     {{0.2, 0.2}, {0, 0}, {0.01, 0.01}},
                     {{0.02, 0.02}, {0, 0}, {0.01, 0.01}}};
    return run_scenario(c);
}

}  // namespace

TEST(Convergence, ConstantDisturbanceErrorsVanish) {
    for (double delta : {0.5, 2.0}) {
        const double horizon = 10.0 / delta;
        const RunRecord rec = constant_sigma_run(delta, horizon + 5.0);
        double worst_after = 0.0;
        for (const auto& row : rec.rows) {
            if (row.t < horizon - 1e-9) continue;
            const EstimationError e = estimation_errors(row.eta, row.nu, row.sigma, row.est);
            worst_after = std::max({worst_after, norm2(e.e_psi), norm2(e.e_p)});
        }
        EXPECT_LE(worst_after, 1e-6) << "delta " << delta;
    }
}

TEST(Convergence, LyapunovEnvelope) {
    // ‖z(t)‖ ≤ sqrt(λmax/λmin)·e^{−δt}·‖z(0)‖ for the positional error with ω = n = 0.
    const double delta = 0.5;
    SynthesisConfig sc;
    sc.delta_psi1 = sc.delta_p1 = delta;
    const PositionalSolution sol = synthesize_all(sc).gains.pos;
    const auto ev = sym_eigenvalues(sol.P);
    const double kappa = std::sqrt(ev.back() / ev.front());
    const RunRecord rec = constant_sigma_run(delta, 20.0);
    const double z0 = norm2(estimation_errors(rec.rows[0].eta, rec.rows[0].nu, rec.rows[0].sigma, rec.rows[0].est).z_p);
    for (const auto& row : rec.rows) {
        const double z = norm2(estimation_errors(row.eta, row.nu, row.sigma, row.est).z_p);
        EXPECT_LE(z, kappa * std::exp(-delta * row.t) * z0 * (1 + 1e-6) + 1e-12) << row.t;
    }
}
