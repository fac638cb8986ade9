#pragma once

// Small dense linear algebra and ODE stepping. Sized for the observer design
// problems (matrices up to a few dozen rows); everything is value-semantic.

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "asvobs/errors.hpp"

namespace asvobs {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix diagonal(std::span<const double> d);
    static Matrix column(std::span<const double> v);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }
    [[nodiscard]] bool is_square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> data() const { return data_; }
    [[nodiscard]] std::span<double> data() { return data_; }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
    [[nodiscard]] Vector col(std::size_t j) const;
    [[nodiscard]] Vector row(std::size_t i) const;

    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool is_finite() const;
    [[nodiscard]] bool is_zero() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

/// Symmetric matrix; writes through set() mirror across the diagonal.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : m_(n, n) {}
    /// Throws std::invalid_argument unless `m` is square and exactly symmetric.
    explicit SymMatrix(Matrix m);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymMatrix(Matrix(rows)) {}

    /// (m + mᵀ) / 2.
    static SymMatrix symmetrized(const Matrix& m);
    static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

    [[nodiscard]] std::size_t dim() const { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    void set(std::size_t i, std::size_t j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }
    [[nodiscard]] const Matrix& matrix() const { return m_; }
    operator const Matrix&() const { return m_; }  // NOLINT(google-explicit-constructor)

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    Matrix m_;
};

struct EigenResult {
    Vector values;   // ascending
    Matrix vectors;  // orthonormal columns, vectors.col(k) pairs with values[k]
};

// Vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double s);
bool all_finite(std::span<const double> a);

/// Lower-triangular L with L·Lᵀ = S. Throws NotPositiveDefinite on a non-positive pivot.
Matrix cholesky(const SymMatrix& s);

/// Cyclic Jacobi decomposition; eigenvalues ascending. Throws NonFinite.
EigenResult sym_eigen(const SymMatrix& s);
/// Eigenvalues only (same algorithm, skips vector accumulation).
Vector sym_eigenvalues(const SymMatrix& s);
double max_eigenvalue(const SymMatrix& s);
double min_eigenvalue(const SymMatrix& s);

/// sqrt(λ_max(AᵀA)).
double spectral_norm(const Matrix& a);

/// Gaussian elimination with partial pivoting. Throws Singular when a pivot
/// falls below 1e-14·‖A‖_max.
Vector solve_linear(const Matrix& a, std::span<const double> b);
/// Column-wise solve of A·X = B.
Matrix solve_linear(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

/// Eigenvalues of a general real square matrix (balancing, Hessenberg
/// reduction, shifted QR). Order unspecified.
std::vector<std::complex<double>> general_eigenvalues(const Matrix& a);
/// Largest real part among the eigenvalues of `a`.
double spectral_abscissa(const Matrix& a);

/// One classical Runge–Kutta step of ẋ = f(t, x).
template <typename F>
Vector rk4_step(F&& f, std::span<const double> x, double t, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("rk4_step: step must be positive");
    const std::size_t n = x.size();
    auto checked = [](Vector d) {
        if (!all_finite(d)) throw NonFinite("rk4_step: non-finite derivative");
        return d;
    };
    Vector tmp(n);
    const Vector k1 = checked(f(t, Vector(x.begin(), x.end())));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    const Vector k2 = checked(f(t + 0.5 * h, tmp));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    const Vector k3 = checked(f(t + 0.5 * h, tmp));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    const Vector k4 = checked(f(t + h, tmp));
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace asvobs
