#include "asvobs/observers.hpp"

#include <algorithm>
#include <cmath>

#include "asvobs/observer_model.hpp"

namespace asvobs {

Vector to_vector(const RotationalEstimate& e) { return {e.psi_hat, e.r_hat, e.sigma_r_hat}; }

Vector to_vector(const PositionalEstimate& e) {
    return {e.x_hat, e.y_hat, e.u_hat, e.v_hat, e.sigma_u_hat, e.sigma_v_hat};
}

RotationalEstimate rotational_from(std::span<const double> v) {
    if (v.size() != 3) throw std::invalid_argument("rotational_from: need 3 values");
    return {v[0], v[1], v[2]};
}

PositionalEstimate positional_from(std::span<const double> v) {
    if (v.size() != 6) throw std::invalid_argument("positional_from: need 6 values");
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

Vector rotational_state(const Pose& eta, const BodyVelocity& nu, const LumpedDisturbance& s) {
    return {eta.psi, nu.r, s.sigma_r};
}

Vector positional_state(const Pose& eta, const BodyVelocity& nu, const LumpedDisturbance& s) {
    return {eta.x, eta.y, nu.u, nu.v, s.sigma_u, s.sigma_v};
}

// The model matrices are sparse; the derivatives below are written out
// directly and cross-checked against the matrix forms in the tests.

Vector rotational_derivative(std::span<const double> x, double y_psi, const ControlInput& tau,
                             std::span<const double> L, const Matrix& M_inv) {
    const double innov = y_psi - x[0];
    const double r_dot = M_inv(2, 0) * tau.F_u + M_inv(2, 2) * tau.tau_r + x[2];
    return {x[1] + L[0] * innov, r_dot + L[1] * innov, L[2] * innov};
}

Vector positional_derivative(std::span<const double> x, const std::array<double, 2>& y_p, double psi,
                             const ControlInput& tau, const Matrix& L_pz, const Matrix& M_inv) {
    const double c = std::cos(psi), s = std::sin(psi);
    // Innovation expressed in the body frame, R₂ᵀ(ψ)(y − ŷ).
    const double ex = y_p[0] - x[0], ey = y_p[1] - x[1];
    const double bx = c * ex + s * ey;
    const double by = -s * ex + c * ey;
    // k = L_pz·R₂ᵀ·innovation; L_p(ψ)·innovation = −T_p⁻¹·k.
    double k[6];
    for (int i = 0; i < 6; ++i) k[i] = L_pz(i, 0) * bx + L_pz(i, 1) * by;
    Vector d(6);
    d[0] = c * x[2] - s * x[3] - (c * k[0] - s * k[1]);
    d[1] = s * x[2] + c * x[3] - (s * k[0] + c * k[1]);
    d[2] = M_inv(0, 0) * tau.F_u + M_inv(0, 2) * tau.tau_r + x[4] - k[2];
    d[3] = M_inv(1, 0) * tau.F_u + M_inv(1, 2) * tau.tau_r + x[5] - k[3];
    d[4] = -k[4];
    d[5] = -k[5];
    return d;
}

RotationalEstimate rotational_derivative(const RotationalEstimate& est, double y_psi, const ControlInput& tau,
                                         std::span<const double> L_psi, const Matrix& M_inv) {
    return rotational_from(rotational_derivative(to_vector(est), y_psi, tau, L_psi, M_inv));
}

PositionalEstimate positional_derivative(const PositionalEstimate& est, const std::array<double, 2>& y_p,
                                         double psi, const ControlInput& tau, const PositionalSolution& sol,
                                         const Matrix& M_inv) {
    return positional_from(positional_derivative(to_vector(est), y_p, psi, tau, positional_gain_z(sol), M_inv));
}

namespace {

double spectral_radius(const Matrix& a) {
    double rho = 0.0;
    for (const auto& z : general_eigenvalues(a)) rho = std::max(rho, std::abs(z));
    return rho;
}

}  // namespace

CascadeObserver::CascadeObserver(const ObserverGains& gains, const Matrix& M_inv)
    : L_psi_(gains.rot.L.empty() ? extract_rotational_gain(gains.rot) : gains.rot.L),
      L_pz_(positional_gain_z(gains.pos)),
      M_inv_(M_inv) {
    if (L_psi_.size() != 3 || L_pz_.rows() != 6 || L_pz_.cols() != 2)
        throw std::invalid_argument("CascadeObserver: gain dimensions");
    RotationalSolution rot = gains.rot;
    rot.L = L_psi_;
    rho_ = spectral_radius(rotational_error_matrix(rot));
    for (double r : {gains.config.r_min, 0.0, gains.config.r_max})
        rho_ = std::max(rho_, spectral_radius(positional_error_matrix(gains.pos, r)));
}

Vector CascadeObserver::rotational_rate(std::span<const double> chi_hat, const Measurement& y,
                                        const ControlInput& tau) const {
    return rotational_derivative(chi_hat, y.psi, tau, L_psi_, M_inv_);
}

Vector CascadeObserver::positional_rate(std::span<const double> chi_hat, const Measurement& y,
                                        const ControlInput& tau) const {
    return positional_derivative(chi_hat, {y.x, y.y}, y.psi, tau, L_pz_, M_inv_);
}

int CascadeObserver::substeps(double h) const {
    if (!(h > 0.0)) throw std::invalid_argument("observer step must be positive");
    return std::max(1, static_cast<int>(std::ceil(h * rho_)));
}

ObserverEstimates CascadeObserver::step(const ObserverEstimates& est, const Measurement& y,
                                        const ControlInput& tau, double h) const {
    const int n = substeps(h);
    const double hs = h / n;
    const std::array<double, 2> y_p{y.x, y.y};
    auto f_rot = [&](double, const Vector& x) { return rotational_derivative(x, y.psi, tau, L_psi_, M_inv_); };
    auto f_pos = [&](double, const Vector& x) { return positional_derivative(x, y_p, y.psi, tau, L_pz_, M_inv_); };
    Vector xr = to_vector(est.rot);
    Vector xp = to_vector(est.pos);
    for (int i = 0; i < n; ++i) {
        xr = rk4_step(f_rot, xr, i * hs, hs);
        xp = rk4_step(f_pos, xp, i * hs, hs);
    }
    return {rotational_from(xr), positional_from(xp)};
}

ObserverEstimates observer_step(const ObserverEstimates& est, const Measurement& y, const ControlInput& tau,
                                const CascadeObserver& obs, double h) {
    return obs.step(est, y, tau, h);
}

EstimationError estimation_errors(const Pose& eta, const BodyVelocity& nu, const LumpedDisturbance& sigma,
                                  const ObserverEstimates& est) {
    EstimationError e;
    e.e_psi = sub(rotational_state(eta, nu, sigma), to_vector(est.rot));
    e.e_p = sub(positional_state(eta, nu, sigma), to_vector(est.pos));
    e.z_p = model::T_p(eta.psi) * e.e_p;
    return e;
}

}  // namespace asvobs
