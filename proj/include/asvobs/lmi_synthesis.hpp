#pragma once

// Observer gain synthesis: LMI programs for the rotational and positional
// observers, gain extraction, independent certificate checks and ISS bounds.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "asvobs/sdp_solver.hpp"

namespace asvobs {

struct SynthesisConfig {
    double delta_psi1 = 0.05;
    double delta_p1 = 0.05;
    double k_omega_p = 1.0;
    double k_n_p = 0.0;
    double r_min = -0.8727;
    double r_max = 0.8727;
    SymMatrix M = SymMatrix{{25.8, 0, 0}, {0, 33.8, 1.0948}, {0, 1.0948, 2.76}};
    // Regularisation keeping the optimum at finite gains (see README).
    double p_min = 1e-2;     // P ⪰ p_min·I
    double gain_reg = 1e-5;  // β ≥ gain_reg·‖W‖ where the objective does not already bound W
    double eps_feas = 1e-6;

    /// Throws InvalidConfig.
    void validate() const;
    friend bool operator==(const SynthesisConfig&, const SynthesisConfig&) = default;
};

/// Canonical text of every field (17 significant digits), used for hashing and file headers.
std::string canonical_text(const SynthesisConfig& c);
/// FNV-1a 64 of canonical_text.
std::uint64_t config_hash(const SynthesisConfig& c);

enum class ProgramKind { Rotational, Positional };

struct SynthesisProblem {
    ProgramKind kind;
    SynthesisConfig config;
    LmiProblem lmi;
    std::size_t n_state;  // 3 or 6
    std::size_t n_out;    // 1 or 2

    [[nodiscard]] std::size_t n_p_vars() const { return n_state * (n_state + 1) / 2; }
    [[nodiscard]] std::size_t w_index(std::size_t i, std::size_t j) const { return n_p_vars() + i * n_out + j; }
    [[nodiscard]] std::size_t beta_index() const { return n_p_vars() + n_state * n_out; }
    [[nodiscard]] std::size_t p_index(std::size_t i, std::size_t j) const;
};

SynthesisProblem build_rotational_problem(const SynthesisConfig& config);
SynthesisProblem build_positional_problem(const SynthesisConfig& config);

struct RotationalSolution {
    SymMatrix P;
    Vector W;
    double beta = 0.0;
    Vector L;
};

struct PositionalSolution {
    SymMatrix P;
    Matrix W;  // 6×2
    double beta = 0.0;
};

struct ObserverGains {
    SynthesisConfig config;
    RotationalSolution rot;
    PositionalSolution pos;
};

/// P, W and β read out of a decision vector, and the inverse packing.
SymMatrix unpack_P(const SynthesisProblem& p, std::span<const double> x);
Matrix unpack_W(const SynthesisProblem& p, std::span<const double> x);
Vector pack(const SynthesisProblem& p, const SymMatrix& P, const Matrix& W, double beta);

/// L_ψ = −P_ψ⁻¹W_ψ. Throws Singular.
Vector extract_rotational_gain(const RotationalSolution& sol);
RotationalSolution rotational_solution(const SynthesisProblem& p, std::span<const double> x);
PositionalSolution positional_solution(const SynthesisProblem& p, std::span<const double> x);

struct Transformation {
    Matrix T;
    Matrix T_inv;
};
Transformation transformation(double psi);

/// L_p(ψ) = −T_p⁻¹P_p⁻¹W_pR₂ᵀ(ψ). Throws Singular.
Matrix positional_gain(const PositionalSolution& sol, double psi);
/// L_pz = P_p⁻¹W_p, the gain of the transformed error dynamics.
Matrix positional_gain_z(const PositionalSolution& sol);

/// A_ψ + P⁻¹W C_ψ  (= A_ψ − L_ψC_ψ).
Matrix rotational_error_matrix(const RotationalSolution& sol);
/// A_0,p + r·S_Tp + L_pz·C_p.
Matrix positional_error_matrix(const PositionalSolution& sol, double r);

struct VerifyTolerance {
    double block = 1e-7;
    double pole = 1e-6;
};

struct BlockCheck {
    std::string name;
    double max_eigenvalue;
    bool pass;
};

struct PoleCheck {
    double r;  // yaw rate at which the positional spectrum was taken (0 for rotational)
    double abscissa;
    double limit;
    bool pass;
};

struct VerificationReport {
    ProgramKind kind;
    std::vector<BlockCheck> blocks;
    double lambda_min_P = 0.0;
    std::vector<PoleCheck> poles;
    bool pass = false;
};

/// Independent eigenvalue checks of every block at x, P ≻ 0 and the closed-loop pole half-plane.
VerificationReport verify_solution(const SynthesisProblem& p, std::span<const double> x,
                                   const VerifyTolerance& tol = {});
void print_report(std::ostream& os, const VerificationReport& r);

struct SynthesisResult {
    SynthesisProblem problem;
    SdpResult sdp;
    VerificationReport report;
};

/// Build, solve and verify one program.
SynthesisResult synthesize(ProgramKind kind, const SynthesisConfig& config, const SolverOptions& opts = {});

struct SynthesisOutput {
    ObserverGains gains;
    VerificationReport rot_report;
    VerificationReport pos_report;
};
/// Both programs plus gain extraction.
SynthesisOutput synthesize_all(const SynthesisConfig& config, const SolverOptions& opts = {});

struct GainsVerification {
    VerificationReport rot;
    VerificationReport pos;
    [[nodiscard]] bool pass() const { return rot.pass && pos.pass; }
};
/// Re-runs verify_solution on stored gains against the programs of g.config.
GainsVerification verify_gains(const ObserverGains& g, const VerifyTolerance& tol = {});

struct SignalBounds {
    double omega = 0.0;  // bound on ‖ω‖
    double noise = 0.0;  // bound on ‖n_p‖ (positional only)
};

/// sqrt(λmax(P)/λmin(P))·2‖PB_ω,ψ‖·ω*/θ. Throws InvalidTheta unless 0 < θ < 1.
double iss_bound(const RotationalSolution& sol, double theta, const SignalBounds& b);
/// sqrt(λmax/λmin)·2‖Υ_p‖·‖Γ'_p‖/θ, Υ_p = [P B_ω k_ω, W k_n], Γ'_p = [ω*/k_ω, n*/k_n].
/// A zero weight is replaced by 1 for its channel (the weight cancels in Υ_pΓ'_p).
double iss_bound(const PositionalSolution& sol, const SynthesisConfig& c, double theta, const SignalBounds& b);

/// Gains file: header with the config echo and hash, then labelled matrices.
void write_gains(std::ostream& os, const ObserverGains& g);
void write_gains_file(const std::string& path, const ObserverGains& g);
/// Returns the gains and the hash recorded in the header. Throws ParseError / IoError.
struct LoadedGains {
    ObserverGains gains;
    std::uint64_t hash = 0;
};
LoadedGains read_gains(std::istream& is);
LoadedGains read_gains_file(const std::string& path);

}  // namespace asvobs
