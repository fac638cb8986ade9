#pragma once

// Cascade estimator: linear rotational observer on [ψ, r, σ_r] and the
// heading-scheduled positional observer on [x, y, u, v, σ_u, σ_v].

#include "asvobs/lmi_synthesis.hpp"
#include "asvobs/vessel_model.hpp"

namespace asvobs {

struct RotationalEstimate {
    double psi_hat = 0.0;
    double r_hat = 0.0;
    double sigma_r_hat = 0.0;
    friend bool operator==(const RotationalEstimate&, const RotationalEstimate&) = default;
};

struct PositionalEstimate {
    double x_hat = 0.0;
    double y_hat = 0.0;
    double u_hat = 0.0;
    double v_hat = 0.0;
    double sigma_u_hat = 0.0;
    double sigma_v_hat = 0.0;
    friend bool operator==(const PositionalEstimate&, const PositionalEstimate&) = default;
};

struct ObserverEstimates {
    RotationalEstimate rot;
    PositionalEstimate pos;
    friend bool operator==(const ObserverEstimates&, const ObserverEstimates&) = default;
};

struct EstimationError {
    Vector e_psi;  // 3
    Vector e_p;    // 6
    Vector z_p;    // T_p(ψ)·e_p
};

Vector to_vector(const RotationalEstimate& e);
Vector to_vector(const PositionalEstimate& e);
RotationalEstimate rotational_from(std::span<const double> v);
PositionalEstimate positional_from(std::span<const double> v);

/// True subsystem states χ_ψ and χ_p.
Vector rotational_state(const Pose& eta, const BodyVelocity& nu, const LumpedDisturbance& s);
Vector positional_state(const Pose& eta, const BodyVelocity& nu, const LumpedDisturbance& s);

/// χ̂̇_ψ = A_ψχ̂ + B_ψτ + L_ψ(y_ψ − C_ψχ̂).
Vector rotational_derivative(std::span<const double> chi_hat, double y_psi, const ControlInput& tau,
                             std::span<const double> L_psi, const Matrix& M_inv);
/// χ̂̇_p = A_p(ψ)χ̂ + B_pτ + L_p(ψ)(y_p − C_pχ̂), with L_p(ψ) = −T_p⁻¹(ψ)·L_pz·R₂ᵀ(ψ).
Vector positional_derivative(std::span<const double> chi_hat, const std::array<double, 2>& y_p, double psi,
                             const ControlInput& tau, const Matrix& L_pz, const Matrix& M_inv);

RotationalEstimate rotational_derivative(const RotationalEstimate& est, double y_psi, const ControlInput& tau,
                                         std::span<const double> L_psi, const Matrix& M_inv);
PositionalEstimate positional_derivative(const PositionalEstimate& est, const std::array<double, 2>& y_p,
                                         double psi, const ControlInput& tau, const PositionalSolution& sol,
                                         const Matrix& M_inv);

/// Both observers with their gains; stateless, so one instance can serve many runs.
class CascadeObserver {
public:
    /// Throws Singular if P_p cannot be inverted.
    CascadeObserver(const ObserverGains& gains, const Matrix& M_inv);

    /// Advance both estimates by h with y and τ held over the step. The
    /// step is split into ceil(h·ρ) RK4 substeps, ρ being the largest
    /// closed-loop pole magnitude, so fast designs stay inside the RK4
    /// stability region. Throws NonFinite, std::invalid_argument for h ≤ 0.
    [[nodiscard]] ObserverEstimates step(const ObserverEstimates& est, const Measurement& y,
                                         const ControlInput& tau, double h) const;

    /// Right-hand sides of the two observers for a measurement at the current instant.
    [[nodiscard]] Vector rotational_rate(std::span<const double> chi_hat, const Measurement& y,
                                         const ControlInput& tau) const;
    [[nodiscard]] Vector positional_rate(std::span<const double> chi_hat, const Measurement& y,
                                         const ControlInput& tau) const;

    [[nodiscard]] int substeps(double h) const;
    [[nodiscard]] double pole_radius() const { return rho_; }
    [[nodiscard]] const Vector& L_psi() const { return L_psi_; }
    [[nodiscard]] const Matrix& L_pz() const { return L_pz_; }

private:
    Vector L_psi_;
    Matrix L_pz_;
    Matrix M_inv_;
    double rho_ = 0.0;
};

ObserverEstimates observer_step(const ObserverEstimates& est, const Measurement& y, const ControlInput& tau,
                                const CascadeObserver& obs, double h);

/// e = χ − χ̂ for both subsystems and z_p = T_p(ψ)e_p at the true heading.
EstimationError estimation_errors(const Pose& eta, const BodyVelocity& nu, const LumpedDisturbance& sigma,
                                  const ObserverEstimates& est);

}  // namespace asvobs
