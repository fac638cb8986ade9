#pragma once

// State-space matrices of the two observer subsystems.
//   rotational χ_ψ = [ψ, r, σ_r]
//   positional χ_p = [x, y, u, v, σ_u, σ_v]
// Input matrices act on the full generalised force τ = [F_u, 0, τ_r].

#include "asvobs/numerics.hpp"

namespace asvobs::model {

Matrix A_psi();
/// 3×3; only the yaw row of M⁻¹ enters (row 2).
Matrix B_psi(const Matrix& M_inv);
Matrix B_omega_psi();  // e3
Matrix C_psi();        // e1ᵀ

Matrix A_p(double psi);
/// 6×3; the surge/sway rows of M⁻¹ enter rows 2–3.
Matrix B_p(const Matrix& M_inv);
Matrix B_omega_p();  // [0; 0; I₂]
Matrix C_p();        // [I₂ 0 0]

Matrix A0_p();
Matrix S_p();
Matrix S_Tp();

/// T_p(ψ) = blkdiag(R₂ᵀ(ψ), I₂, I₂).
Matrix T_p(double psi);
Matrix T_p_inv(double psi);

}  // namespace asvobs::model
