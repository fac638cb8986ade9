#include "asvobs/observer_model.hpp"

#include "asvobs/vessel_model.hpp"

namespace asvobs::model {

Matrix A_psi() { return {{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}; }

Matrix B_psi(const Matrix& M_inv) {
    Matrix b(3, 3);
    b.set_block(1, 0, M_inv.block(2, 0, 1, 3));
    return b;
}

Matrix B_omega_psi() { return {{0}, {0}, {1}}; }

Matrix C_psi() { return {{1, 0, 0}}; }

Matrix A_p(double psi) {
    Matrix a(6, 6);
    a.set_block(0, 2, rotation2(psi));
    a.set_block(2, 4, Matrix::identity(2));
    return a;
}

Matrix B_p(const Matrix& M_inv) {
    Matrix b(6, 3);
    b.set_block(2, 0, M_inv.block(0, 0, 2, 3));
    return b;
}

Matrix B_omega_p() {
    Matrix b(6, 2);
    b.set_block(4, 0, Matrix::identity(2));
    return b;
}

Matrix C_p() {
    Matrix c(2, 6);
    c.set_block(0, 0, Matrix::identity(2));
    return c;
}

Matrix A0_p() {
    Matrix a(6, 6);
    a.set_block(0, 2, Matrix::identity(2));
    a.set_block(2, 4, Matrix::identity(2));
    return a;
}

Matrix S_p() { return {{0, -1}, {1, 0}}; }

Matrix S_Tp() {
    Matrix s(6, 6);
    s.set_block(0, 0, S_p().transpose());
    return s;
}

Matrix T_p(double psi) {
    Matrix t = Matrix::identity(6);
    t.set_block(0, 0, rotation2(psi).transpose());
    return t;
}

Matrix T_p_inv(double psi) {
    Matrix t = Matrix::identity(6);
    t.set_block(0, 0, rotation2(psi));
    return t;
}

}  // namespace asvobs::model
