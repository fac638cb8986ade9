#pragma once

// Three degree-of-freedom surface vessel: kinematics, rigid-body plus
// hydrodynamic kinetics, lumped disturbance and GPS/compass measurement.

#include <array>

#include "asvobs/numerics.hpp"

namespace asvobs {

/// Hydrodynamic and rigid-body coefficients; defaults are the CyberShip II model-ship values.
struct VesselParams {
    double m = 23.8;
    double I_z = 1.76;
    double x_g = 0.046;
    double X_udot = -2.0;
    double Y_vdot = -10.0;
    double Y_rdot = 0.0;
    double N_vdot = 0.0;
    double N_rdot = -1.0;
    double X_u = -0.72253;
    double X_uu = -1.32742;
    double Y_v = -0.88965;
    double Y_vv = -36.47287;
    double Y_vr = -0.805;
    double Y_r = -7.25;
    double Y_rv = -0.845;
    double Y_rr = -3.45;
    double N_v = 0.0313;
    double N_vv = 3.95645;
    double N_vr = 0.13;
    double N_r = -1.9;
    double N_rv = 0.08;
    double N_rr = -0.75;

    /// Throws InvalidConfig on non-finite values, m/I_z ≤ 0 or Y_rdot != N_vdot,
    /// NotPositiveDefinite when the inertia matrix is not SPD.
    void validate() const;

    friend bool operator==(const VesselParams&, const VesselParams&) = default;
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;  // unwrapped
};

struct BodyVelocity {
    double u = 0.0;
    double v = 0.0;
    double r = 0.0;
};

/// Surge force and yaw torque; the sway channel is not actuated.
struct ControlInput {
    double F_u = 0.0;
    double tau_r = 0.0;
};

struct EnvDisturbance {
    double F_wu = 0.0;
    double F_wv = 0.0;
    double tau_wr = 0.0;
};

struct LumpedDisturbance {
    double sigma_u = 0.0;
    double sigma_v = 0.0;
    double sigma_r = 0.0;
};

struct VesselState {
    Pose eta;
    BodyVelocity nu;
};

/// Time derivative of a VesselState (same layout).
struct StateRate {
    Pose eta_dot;
    BodyVelocity nu_dot;
};

struct Measurement {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;
};

Matrix rotation(double psi);
/// Upper-left 2×2 block of rotation(psi).
Matrix rotation2(double psi);

SymMatrix inertia_matrix(const VesselParams& p);
Matrix coriolis(const VesselParams& p, const BodyVelocity& nu);
Matrix damping(const VesselParams& p, const BodyVelocity& nu);

Vector to_vector(const BodyVelocity& nu);
Vector to_vector(const ControlInput& tau);  // [F_u, 0, tau_r]
Vector to_vector(const EnvDisturbance& w);
Vector to_vector(const LumpedDisturbance& s);

/// Validated parameter set with the inertia matrix and its inverse cached.
class VesselModel {
public:
    explicit VesselModel(VesselParams params = {});

    [[nodiscard]] const VesselParams& params() const { return params_; }
    [[nodiscard]] const SymMatrix& M() const { return M_; }
    [[nodiscard]] const Matrix& M_inv() const { return M_inv_; }

    /// σ = M⁻¹(−C(ν)ν − D(ν)ν + τ_w); the restoring term is taken as zero.
    [[nodiscard]] LumpedDisturbance lumped_disturbance(const BodyVelocity& nu, const EnvDisturbance& tau_w) const;

    /// η̇ = R(ψ)ν, ν̇ = M⁻¹τ + σ.
    [[nodiscard]] StateRate derivative(const VesselState& s, const ControlInput& tau,
                                       const EnvDisturbance& tau_w) const;
    /// Same plant evaluated as M ν̇ + C(ν)ν + D(ν)ν = τ + τ_w, solved directly.
    [[nodiscard]] StateRate derivative_full(const VesselState& s, const ControlInput& tau,
                                            const EnvDisturbance& tau_w) const;
    /// Reduced dynamics with an externally prescribed σ.
    [[nodiscard]] StateRate derivative_prescribed(const VesselState& s, const ControlInput& tau,
                                                  const LumpedDisturbance& sigma) const;

    /// One RK4 step with τ and τ_w held over the step.
    [[nodiscard]] VesselState step(const VesselState& s, const ControlInput& tau, const EnvDisturbance& tau_w,
                                   double h) const;
    /// One RK4 step of the reduced dynamics with σ held over the step.
    [[nodiscard]] VesselState step_prescribed(const VesselState& s, const ControlInput& tau,
                                              const LumpedDisturbance& sigma, double h) const;

private:
    VesselParams params_;
    SymMatrix M_;
    Matrix M_inv_;
};

// Free-function forms; each builds a VesselModel from `p`.
LumpedDisturbance lumped_disturbance(const VesselParams& p, const Pose& eta, const BodyVelocity& nu,
                                     const EnvDisturbance& tau_w);
StateRate dynamics_derivative(const VesselParams& p, const VesselState& s, const ControlInput& tau,
                              const EnvDisturbance& tau_w);
VesselState step(const VesselParams& p, const VesselState& s, const ControlInput& tau,
                 const EnvDisturbance& tau_w, double h);

/// GPS position plus noiseless heading.
Measurement measure(const Pose& eta, const std::array<double, 2>& n_p);

/// Wrap to (−π, π].
double wrap_angle(double a);

}  // namespace asvobs
