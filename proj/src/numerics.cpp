#include "asvobs/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace asvobs {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Matrix: dimensions must be >= 1");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("Matrix: dimensions must be >= 1");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::column(std::span<const double> v) {
    Matrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("Matrix::block");
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw std::out_of_range("Matrix::set_block");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Vector Matrix::col(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

Vector Matrix::row(std::size_t i) const {
    return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

double Matrix::frobenius_norm() const { return norm2(data_); }

double Matrix::max_abs() const { return norm_inf(data_); }

bool Matrix::is_finite() const { return all_finite(data_); }

bool Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("Matrix +=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("Matrix -=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Matrix *: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("Matrix * vector: shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw std::invalid_argument("SymMatrix: not square");
    for (std::size_t i = 0; i < m_.rows(); ++i)
        for (std::size_t j = i + 1; j < m_.cols(); ++j)
            if (m_(i, j) != m_(j, i)) throw std::invalid_argument("SymMatrix: not symmetric");
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
    if (!m.is_square()) throw std::invalid_argument("SymMatrix: not square");
    SymMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) {
    // Scaled to avoid overflow on the very large entries met in badly scaled LMIs.
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double s = 0.0;
    for (double v : a) s += (v / scale) * (v / scale);
    return scale * std::sqrt(s);
}

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

Vector add(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("add: size mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vector scaled(std::span<const double> a, double s) {
    Vector r(a.begin(), a.end());
    for (double& v : r) v *= s;
    return r;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Matrix cholesky(const SymMatrix& s) {
    const std::size_t n = s.dim();
    if (!s.matrix().is_finite()) throw NonFinite("cholesky: non-finite input");
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0))
            throw NotPositiveDefinite("cholesky: non-positive pivot at index " + std::to_string(j));
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return l;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// Cyclic Jacobi; `v` is accumulated when non-null.
Vector jacobi(Matrix a, Matrix* v) {
    const std::size_t n = a.rows();
    if (!a.is_finite()) throw NonFinite("sym_eigen: non-finite input");
    const double scale = a.frobenius_norm();
    if (v) *v = Matrix::identity(n);
    constexpr int kMaxSweeps = 50;
    const double target = 1e-13 * scale;
    for (int sweep = 0; sweep < kMaxSweeps && scale > 0.0; ++sweep) {
        if (off_diagonal_norm(a) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                if (v) {
                    Matrix& vm = *v;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = vm(k, p);
                        const double vkq = vm(k, q);
                        vm(k, p) = c * vkp - s * vkq;
                        vm(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
    return d;
}

}  // namespace

EigenResult sym_eigen(const SymMatrix& s) {
    Matrix v;
    Vector d = jacobi(s.matrix(), &v);
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    EigenResult r{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        r.values[k] = d[order[k]];
        for (std::size_t i = 0; i < n; ++i) r.vectors(i, k) = v(i, order[k]);
    }
    return r;
}

Vector sym_eigenvalues(const SymMatrix& s) {
    Vector d = jacobi(s.matrix(), nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

double max_eigenvalue(const SymMatrix& s) { return sym_eigenvalues(s).back(); }

double min_eigenvalue(const SymMatrix& s) { return sym_eigenvalues(s).front(); }

double spectral_norm(const Matrix& a) {
    if (!a.is_finite()) throw NonFinite("spectral_norm: non-finite input");
    const Matrix ata = a.transpose() * a;
    const double lmax = max_eigenvalue(SymMatrix::symmetrized(ata));
    return std::sqrt(std::max(lmax, 0.0));
}

Vector solve_linear(const Matrix& a, std::span<const double> b) {
    if (!a.is_square() || a.rows() != b.size()) throw std::invalid_argument("solve_linear: shape mismatch");
    if (!a.is_finite() || !all_finite(b)) throw NonFinite("solve_linear: non-finite input");
    const std::size_t n = a.rows();
    Matrix m = a;
    Vector x(b.begin(), b.end());
    const double threshold = 1e-14 * a.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (!(std::abs(m(piv, k)) > threshold)) throw Singular("solve_linear: matrix is singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(x[k], x[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            x[i] -= f * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = x[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= m(k, j) * x[j];
        x[k] = s / m(k, k);
    }
    return x;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
    Matrix x(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const Vector col = solve_linear(a, b.col(j));
        for (std::size_t i = 0; i < col.size(); ++i) x(i, j) = col[i];
    }
    return x;
}

Matrix inverse(const Matrix& a) { return solve_linear(a, Matrix::identity(a.rows())); }

namespace {

// 1-based working storage for the EISPACK-style routines below.
class Work {
public:
    explicit Work(const Matrix& m) : n_(m.rows()), d_((n_ + 1) * (n_ + 1), 0.0) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) (*this)(i + 1, j + 1) = m(i, j);
    }
    double& operator()(std::size_t i, std::size_t j) { return d_[i * (n_ + 1) + j]; }
    [[nodiscard]] std::size_t n() const { return n_; }

private:
    std::size_t n_;
    std::vector<double> d_;
};

void balance(Work& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.n();
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 1; i <= n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (std::size_t j = 1; j <= n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix;
                double f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (std::size_t j = 1; j <= n; ++j) a(i, j) *= g;
                    for (std::size_t j = 1; j <= n; ++j) a(j, i) *= f;
                }
            }
        }
    }
}

void to_hessenberg(Work& a) {
    const std::size_t n = a.n();
    for (std::size_t m = 2; m < n; ++m) {
        double x = 0.0;
        std::size_t i = m;
        for (std::size_t j = m; j <= n; ++j)
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                i = j;
            }
        if (i != m) {
            for (std::size_t j = m - 1; j <= n; ++j) std::swap(a(i, j), a(m, j));
            for (std::size_t j = 1; j <= n; ++j) std::swap(a(j, i), a(j, m));
        }
        if (x != 0.0) {
            for (i = m + 1; i <= n; ++i) {
                double y = a(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (std::size_t j = m; j <= n; ++j) a(i, j) -= y * a(m, j);
                    for (std::size_t j = 1; j <= n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

std::vector<std::complex<double>> hessenberg_qr(Work& a) {
    const int n = static_cast<int>(a.n());
    auto A = [&](int i, int j) -> double& {
        return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    std::vector<double> wr(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> wi(static_cast<std::size_t>(n) + 1, 0.0);
    double anorm = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(A(i, j));
    int nn = n;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
    while (nn >= 1) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 2; --l) {
                s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(A(l, l - 1)) + s == s) {
                    A(l, l - 1) = 0.0;
                    break;
                }
            }
            x = A(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn--] = 0.0;
            } else {
                y = A(nn - 1, nn - 1);
                w = A(nn, nn - 1) * A(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -(wi[nn] = z);
                    }
                    nn -= 2;
                } else {
                    if (its == 60) throw NumericalFailure("general_eigenvalues: QR iteration did not converge");
                    if (its == 10 || its == 20 || its == 40) {
                        t += x;
                        for (int i = 1; i <= nn; ++i) A(i, i) -= x;
                        s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = A(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
                        q = A(m + 1, m + 1) - z - r - s;
                        r = A(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        A(i, i - 2) = 0.0;
                        if (i != m + 2) A(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = A(k, k - 1);
                            q = A(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = A(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) A(k, k - 1) = -A(k, k - 1);
                            } else {
                                A(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = A(k, j) + q * A(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * A(k + 2, j);
                                    A(k + 2, j) -= p * z;
                                }
                                A(k + 1, j) -= p * y;
                                A(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * A(i, k) + y * A(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * A(i, k + 2);
                                    A(i, k + 2) -= p * r;
                                }
                                A(i, k + 1) -= p * q;
                                A(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

std::vector<std::complex<double>> general_eigenvalues(const Matrix& a) {
    if (!a.is_square()) throw std::invalid_argument("general_eigenvalues: not square");
    if (!a.is_finite()) throw NonFinite("general_eigenvalues: non-finite input");
    if (a.rows() == 1) return {{a(0, 0), 0.0}};
    Work w(a);
    balance(w);
    to_hessenberg(w);
    return hessenberg_qr(w);
}

double spectral_abscissa(const Matrix& a) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : general_eigenvalues(a)) m = std::max(m, z.real());
    return m;
}

}  // namespace asvobs
