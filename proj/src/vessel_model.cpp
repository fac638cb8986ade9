#include "asvobs/vessel_model.hpp"

#include <cmath>
#include <numbers>

namespace asvobs {

namespace {

Vector pack(const VesselState& s) { return {s.eta.x, s.eta.y, s.eta.psi, s.nu.u, s.nu.v, s.nu.r}; }

VesselState unpack_state(const Vector& x) { return {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}}; }

Vector pack(const StateRate& d) {
    return {d.eta_dot.x, d.eta_dot.y, d.eta_dot.psi, d.nu_dot.u, d.nu_dot.v, d.nu_dot.r};
}

Pose kinematics(const VesselState& s) {
    const double c = std::cos(s.eta.psi);
    const double sn = std::sin(s.eta.psi);
    return {c * s.nu.u - sn * s.nu.v, sn * s.nu.u + c * s.nu.v, s.nu.r};
}

}  // namespace

void VesselParams::validate() const {
    const double all[] = {m,   I_z,  x_g,  X_udot, Y_vdot, Y_rdot, N_vdot, N_rdot, X_u,  X_uu, Y_v,
                          Y_vv, Y_vr, Y_r, Y_rv,   Y_rr,   N_v,    N_vv,   N_vr,   N_r,  N_rv, N_rr};
    if (!all_finite(all)) throw InvalidConfig("vessel parameters must be finite");
    if (!(m > 0.0) || !(I_z > 0.0)) throw InvalidConfig("vessel mass and inertia must be positive");
    if (Y_rdot != N_vdot) throw InvalidConfig("Y_rdot must equal N_vdot");
    cholesky(inertia_matrix(*this));
}

Matrix rotation(double psi) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return {{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}};
}

Matrix rotation2(double psi) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return {{c, -s}, {s, c}};
}

SymMatrix inertia_matrix(const VesselParams& p) {
    SymMatrix M(3);
    M.set(0, 0, p.m - p.X_udot);
    M.set(1, 1, p.m - p.Y_vdot);
    M.set(1, 2, p.m * p.x_g - p.Y_rdot);
    M.set(2, 2, p.I_z - p.N_rdot);
    return M;
}

Matrix coriolis(const VesselParams& p, const BodyVelocity& nu) {
    const double c13 = -(p.m - p.Y_vdot) * nu.v - (p.m * p.x_g - p.Y_rdot) * nu.r;
    const double c23 = (p.m - p.X_udot) * nu.u;
    return {{0.0, 0.0, c13}, {0.0, 0.0, c23}, {-c13, -c23, 0.0}};
}

Matrix damping(const VesselParams& p, const BodyVelocity& nu) {
    const double au = std::abs(nu.u);
    const double av = std::abs(nu.v);
    const double ar = std::abs(nu.r);
    return {{-(p.X_u + p.X_uu * au), 0.0, 0.0},
            {0.0, -(p.Y_v + p.Y_vv * av + p.Y_vr * ar), -(p.Y_r + p.Y_rv * av + p.Y_rr * ar)},
            {0.0, -(p.N_v + p.N_vv * av + p.N_vr * ar), -(p.N_r + p.N_rv * av + p.N_rr * ar)}};
}

Vector to_vector(const BodyVelocity& nu) { return {nu.u, nu.v, nu.r}; }
Vector to_vector(const ControlInput& tau) { return {tau.F_u, 0.0, tau.tau_r}; }
Vector to_vector(const EnvDisturbance& w) { return {w.F_wu, w.F_wv, w.tau_wr}; }
Vector to_vector(const LumpedDisturbance& s) { return {s.sigma_u, s.sigma_v, s.sigma_r}; }

VesselModel::VesselModel(VesselParams params) : params_(params) {
    params_.validate();
    M_ = inertia_matrix(params_);
    M_inv_ = inverse(M_);
}

LumpedDisturbance VesselModel::lumped_disturbance(const BodyVelocity& nu, const EnvDisturbance& tau_w) const {
    const Vector n = to_vector(nu);
    const Vector cn = coriolis(params_, nu) * n;
    const Vector dn = damping(params_, nu) * n;
    const Vector w = to_vector(tau_w);
    Vector rhs(3);
    for (std::size_t i = 0; i < 3; ++i) rhs[i] = -cn[i] - dn[i] + w[i];
    const Vector s = M_inv_ * rhs;
    return {s[0], s[1], s[2]};
}

StateRate VesselModel::derivative_prescribed(const VesselState& s, const ControlInput& tau,
                                             const LumpedDisturbance& sigma) const {
    const Vector a = M_inv_ * to_vector(tau);
    return {kinematics(s), {a[0] + sigma.sigma_u, a[1] + sigma.sigma_v, a[2] + sigma.sigma_r}};
}

StateRate VesselModel::derivative(const VesselState& s, const ControlInput& tau,
                                  const EnvDisturbance& tau_w) const {
    return derivative_prescribed(s, tau, lumped_disturbance(s.nu, tau_w));
}

StateRate VesselModel::derivative_full(const VesselState& s, const ControlInput& tau,
                                       const EnvDisturbance& tau_w) const {
    const Vector n = to_vector(s.nu);
    const Vector cn = coriolis(params_, s.nu) * n;
    const Vector dn = damping(params_, s.nu) * n;
    const Vector t = to_vector(tau);
    const Vector w = to_vector(tau_w);
    Vector rhs(3);
    for (std::size_t i = 0; i < 3; ++i) rhs[i] = t[i] + w[i] - cn[i] - dn[i];
    const Vector nd = solve_linear(M_.matrix(), rhs);
    const Vector ed = rotation(s.eta.psi) * n;
    return {{ed[0], ed[1], ed[2]}, {nd[0], nd[1], nd[2]}};
}

VesselState VesselModel::step(const VesselState& s, const ControlInput& tau, const EnvDisturbance& tau_w,
                              double h) const {
    auto f = [&](double, const Vector& x) { return pack(derivative(unpack_state(x), tau, tau_w)); };
    return unpack_state(rk4_step(f, pack(s), 0.0, h));
}

VesselState VesselModel::step_prescribed(const VesselState& s, const ControlInput& tau,
                                         const LumpedDisturbance& sigma, double h) const {
    auto f = [&](double, const Vector& x) { return pack(derivative_prescribed(unpack_state(x), tau, sigma)); };
    return unpack_state(rk4_step(f, pack(s), 0.0, h));
}

LumpedDisturbance lumped_disturbance(const VesselParams& p, const Pose&, const BodyVelocity& nu,
                                     const EnvDisturbance& tau_w) {
    return VesselModel(p).lumped_disturbance(nu, tau_w);
}

StateRate dynamics_derivative(const VesselParams& p, const VesselState& s, const ControlInput& tau,
                              const EnvDisturbance& tau_w) {
    return VesselModel(p).derivative(s, tau, tau_w);
}

VesselState step(const VesselParams& p, const VesselState& s, const ControlInput& tau,
                 const EnvDisturbance& tau_w, double h) {
    return VesselModel(p).step(s, tau, tau_w, h);
}

Measurement measure(const Pose& eta, const std::array<double, 2>& n_p) {
    if (!all_finite(n_p)) throw NonFinite("measure: non-finite noise");
    return {eta.x + n_p[0], eta.y + n_p[1], eta.psi};
}

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(a, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

}  // namespace asvobs
