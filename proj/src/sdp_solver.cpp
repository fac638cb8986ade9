#include "asvobs/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace asvobs {

std::size_t LmiProblem::add_block(std::string name, SymMatrix f0) {
    blocks_.push_back({std::move(name), std::move(f0), {}});
    return blocks_.size() - 1;
}

void LmiProblem::add_term(std::size_t block, std::size_t i, const SymMatrix& f) {
    if (i >= n_vars()) throw std::out_of_range("LmiProblem::add_term: variable index");
    auto& b = blocks_.at(block);
    if (f.dim() != b.dim()) throw std::invalid_argument("LmiProblem::add_term: dimension mismatch");
    for (auto& [j, m] : b.terms)
        if (j == i) {
            m = SymMatrix::symmetrized(m.matrix() + f.matrix());
            return;
        }
    b.terms.emplace_back(i, f);
}

const LmiBlock& LmiProblem::block(const std::string& name) const {
    for (const auto& b : blocks_)
        if (b.name == name) return b;
    throw std::out_of_range("LmiProblem: no block named " + name);
}

SymMatrix LmiProblem::evaluate(std::size_t block, std::span<const double> x) const {
    if (x.size() != n_vars()) throw std::invalid_argument("LmiProblem::evaluate: size mismatch");
    const auto& b = blocks_.at(block);
    Matrix f = b.constant.matrix();
    for (const auto& [i, fi] : b.terms)
        if (x[i] != 0.0) f += fi.matrix() * x[i];
    return SymMatrix::symmetrized(f);
}

void LmiProblem::validate() const {
    if (n_vars() == 0) throw std::invalid_argument("LmiProblem: no variables");
    if (!all_finite(c_)) throw std::invalid_argument("LmiProblem: non-finite objective");
    for (const auto& b : blocks_) {
        if (b.dim() == 0) throw std::invalid_argument("LmiProblem: empty block " + b.name);
        if (!b.constant.matrix().is_finite()) throw std::invalid_argument("LmiProblem: non-finite block " + b.name);
        for (const auto& [i, f] : b.terms) {
            if (i >= n_vars() || f.dim() != b.dim() || !f.matrix().is_finite())
                throw std::invalid_argument("LmiProblem: malformed term in block " + b.name);
        }
    }
}

namespace {

struct DenseBlock {
    Matrix k;                                         // constant of the negated slack: S = −(k + Σ x_i f_i)
    std::vector<std::pair<std::size_t, Matrix>> terms;  // indices into the reduced variable vector
};

// Barrier problem over reduced variables: min t·cᵀx − Σ log det S_j(x) − log(R² − Σ_{ball} x_i²).
struct Barrier {
    std::size_t n = 0;
    Vector c;
    std::vector<DenseBlock> blocks;
    std::vector<char> in_ball;
    double r2 = 0.0;
    std::size_t m_total = 0;
};

struct Slack {
    std::vector<Matrix> linv;  // inverse Cholesky factors of each S_j
    Vector logdet;
    double log_q = 0.0;
};

Matrix lower_inverse(const Matrix& l) {
    const std::size_t n = l.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s -= l(i, k) * inv(k, j);
            inv(i, j) = s / l(i, i);
        }
    }
    return inv;
}

// Cholesky that reports failure instead of throwing.
std::optional<Matrix> try_cholesky(const Matrix& s) {
    const std::size_t n = s.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
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

Matrix slack_matrix(const DenseBlock& b, const Vector& x) {
    Matrix s = b.k;
    for (const auto& [i, f] : b.terms) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        auto sd = s.data();
        auto fd = f.data();
        for (std::size_t k = 0; k < sd.size(); ++k) sd[k] += xi * fd[k];
    }
    s *= -1.0;
    return s;
}

std::optional<Slack> evaluate(const Barrier& bp, const Vector& x, bool want_inverse) {
    Slack out;
    for (const auto& b : bp.blocks) {
        auto l = try_cholesky(slack_matrix(b, x));
        if (!l) return std::nullopt;
        double ld = 0.0;
        for (std::size_t i = 0; i < l->rows(); ++i) ld += std::log((*l)(i, i));
        out.logdet.push_back(2.0 * ld);
        if (want_inverse) out.linv.push_back(lower_inverse(*l));
    }
    double q = bp.r2;
    for (std::size_t i = 0; i < bp.n; ++i)
        if (bp.in_ball[i]) q -= x[i] * x[i];
    if (!(q > 0.0)) return std::nullopt;
    out.log_q = std::log(q);
    return out;
}

// Gradient of the barrier part (without the t·c term) and the Hessian.
void derivatives(const Barrier& bp, const Vector& x, const Slack& s, Vector& g, Matrix& h) {
    g.assign(bp.n, 0.0);
    h = Matrix(bp.n, bp.n);
    for (std::size_t j = 0; j < bp.blocks.size(); ++j) {
        const auto& b = bp.blocks[j];
        const Matrix& li = s.linv[j];
        const Matrix lit = li.transpose();
        std::vector<Matrix> u;
        u.reserve(b.terms.size());
        for (const auto& [i, f] : b.terms) u.push_back(li * f * lit);
        for (std::size_t a = 0; a < b.terms.size(); ++a) {
            const std::size_t ia = b.terms[a].first;
            double tr = 0.0;
            for (std::size_t k = 0; k < u[a].rows(); ++k) tr += u[a](k, k);
            g[ia] += tr;
            const auto ua = u[a].data();
            for (std::size_t c = a; c < b.terms.size(); ++c) {
                const auto uc = u[c].data();
                double v = 0.0;
                for (std::size_t k = 0; k < ua.size(); ++k) v += ua[k] * uc[k];
                const std::size_t ic = b.terms[c].first;
                h(ia, ic) += v;
                if (ic != ia) h(ic, ia) += v;
            }
        }
    }
    const double q = std::exp(s.log_q);
    for (std::size_t i = 0; i < bp.n; ++i) {
        if (!bp.in_ball[i]) continue;
        g[i] += 2.0 * x[i] / q;
        h(i, i) += 2.0 / q;
        for (std::size_t k = 0; k < bp.n; ++k)
            if (bp.in_ball[k]) h(i, k) += 4.0 * x[i] * x[k] / (q * q);
    }
}

// Solves H·d = −g with diagonal equilibration and a Levenberg fallback.
std::optional<Vector> newton_direction(const Matrix& h, const Vector& g) {
    const std::size_t n = g.size();
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = h(i, i) > 0.0 ? 1.0 / std::sqrt(h(i, i)) : 1.0;
    Matrix hs(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) hs(i, k) = d[i] * h(i, k) * d[k];
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -d[i] * g[i];
    for (double lambda = 0.0; lambda <= 1e-2; lambda = lambda == 0.0 ? 1e-14 : lambda * 10.0) {
        Matrix m = hs;
        for (std::size_t i = 0; i < n; ++i) m(i, i) += lambda;
        auto l = try_cholesky(m);
        if (!l) continue;
        Vector y = rhs;
        for (std::size_t i = 0; i < n; ++i) {
            double v = y[i];
            for (std::size_t k = 0; k < i; ++k) v -= (*l)(i, k) * y[k];
            y[i] = v / (*l)(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double v = y[i];
            for (std::size_t k = i + 1; k < n; ++k) v -= (*l)(k, i) * y[k];
            y[i] = v / (*l)(i, i);
        }
        for (std::size_t i = 0; i < n; ++i) y[i] *= d[i];
        if (all_finite(y)) return y;
    }
    return std::nullopt;
}

enum class Centering { Converged, Stalled, Stopped };

// Damped Newton on t·cᵀx + barrier; `stop` is checked after every accepted step.
template <typename Stop>
Centering center(const Barrier& bp, Vector& x, double t, int max_newton, int& newton_count, Stop&& stop) {
    constexpr double kDecrementTol = 1e-10;
    for (int it = 0; it < max_newton; ++it) {
        const auto s = evaluate(bp, x, true);
        if (!s) throw NumericalFailure("barrier iterate left the domain");
        Vector g;
        Matrix h;
        derivatives(bp, x, *s, g, h);
        for (std::size_t i = 0; i < bp.n; ++i) g[i] += t * bp.c[i];
        const auto dx = newton_direction(h, g);
        if (!dx) return Centering::Stalled;
        const double dec = -dot(g, *dx);
        if (!(dec >= 0.0)) return Centering::Stalled;
        if (dec / 2.0 <= kDecrementTol) return Centering::Converged;
        ++newton_count;
        const double cdx = dot(bp.c, *dx);
        double sum_ld = 0.0;
        for (double v : s->logdet) sum_ld += v;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
            Vector xn(bp.n);
            for (std::size_t i = 0; i < bp.n; ++i) xn[i] = x[i] + alpha * (*dx)[i];
            const auto sn = evaluate(bp, xn, false);
            if (!sn) continue;
            double sum_ldn = 0.0;
            for (double v : sn->logdet) sum_ldn += v;
            // Change in the barrier objective, formed from differences to avoid cancellation.
            const double df = t * alpha * cdx - (sum_ldn - sum_ld) - (sn->log_q - s->log_q);
            if (df <= -0.01 * alpha * dec) {
                if (xn == x) break;
                x = std::move(xn);
                accepted = true;
                break;
            }
        }
        if (!accepted) return Centering::Stalled;
        if (stop(x)) return Centering::Stopped;
    }
    return Centering::Stalled;
}

double initial_t(const Barrier& bp, const Vector& x) {
    const auto s = evaluate(bp, x, true);
    if (!s) return 1.0;
    Vector g;
    Matrix h;
    derivatives(bp, x, *s, g, h);
    // t minimising ‖t·c + g‖ in the H⁻¹ norm.
    auto hc = newton_direction(h, bp.c);  // −H⁻¹c
    if (!hc) return 1.0;
    const double chc = -dot(bp.c, *hc);
    const double ghc = -dot(g, *hc);
    const double t = chc > 0.0 ? -ghc / chc : 1.0;
    if (!std::isfinite(t) || t <= 0.0) return 1.0;
    return std::clamp(t, 1e-6, 1e6);
}

struct PathResult {
    Centering last;
    double t;
    int outer;
};

template <typename Stop>
PathResult follow_path(const Barrier& bp, Vector& x, const SolverOptions& o, int& newton_count, Stop&& stop) {
    double t = initial_t(bp, x);
    const double m = static_cast<double>(bp.m_total);
    for (int outer = 1; outer <= o.max_outer; ++outer) {
        const Centering c = center(bp, x, t, o.max_newton, newton_count, stop);
        if (c != Centering::Converged) return {c, t, outer};
        if (m / t < o.gap_tol) return {c, t, outer};
        t *= o.mu;
    }
    return {Centering::Stalled, t, o.max_outer};
}

}  // namespace

SdpResult solve_sdp(const LmiProblem& problem, const SolverOptions& o) {
    problem.validate();
    const std::size_t n_all = problem.n_vars();
    const Vector& c_all = problem.objective();

    // Variables that no block touches are fixed at zero; with a nonzero cost they are unbounded.
    std::vector<char> used(n_all, 0);
    for (const auto& b : problem.blocks())
        for (const auto& [i, f] : b.terms)
            if (!f.matrix().is_zero()) used[i] = 1;
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < n_all; ++i) {
        if (used[i]) free_idx.push_back(i);
        else if (c_all[i] != 0.0) throw NumericalFailure("objective is unbounded in an unconstrained variable");
    }
    std::vector<std::size_t> reduced(n_all, 0);
    for (std::size_t k = 0; k < free_idx.size(); ++k) reduced[free_idx[k]] = k;
    const std::size_t n = free_idx.size();

    auto build = [&](bool phase1) {
        Barrier bp;
        bp.n = n + (phase1 ? 1 : 0);
        bp.c.assign(bp.n, 0.0);
        if (phase1) bp.c[n] = 1.0;
        else
            for (std::size_t k = 0; k < n; ++k) bp.c[k] = c_all[free_idx[k]];
        bp.in_ball.assign(bp.n, 1);
        if (phase1) bp.in_ball[n] = 0;
        bp.r2 = o.radius * o.radius;
        bp.m_total = 1;
        for (const auto& b : problem.blocks()) {
            DenseBlock d;
            d.k = b.constant.matrix() + Matrix::identity(b.dim()) * o.eps_feas;
            for (const auto& [i, f] : b.terms)
                if (used[i]) d.terms.emplace_back(reduced[i], f.matrix());
            if (phase1) d.terms.emplace_back(n, Matrix::identity(b.dim()) * -1.0);
            bp.m_total += b.dim();
            bp.blocks.push_back(std::move(d));
        }
        return bp;
    };

    SdpResult result;
    Vector x(n, 0.0);

    // Phase 1: min s subject to F_j(x) + eps·I ⪯ s·I.
    {
        const Barrier bp = build(true);
        double s0 = 0.0;
        for (const auto& b : bp.blocks) s0 = std::max(s0, max_eigenvalue(SymMatrix::symmetrized(b.k)));
        Vector xs(x);
        xs.push_back(s0 + 1.0);
        if (!evaluate(bp, xs, false)) throw NumericalFailure("phase 1 start point is not interior");
        bool feasible = xs[n] < 0.0;
        if (!feasible) {
            auto stop = [&](const Vector& v) { return v[n] < 0.0; };
            const auto r = follow_path(bp, xs, o, result.report.phase1_newton, stop);
            feasible = r.last == Centering::Stopped;
            if (!feasible) {
                const double lower = xs[n] - static_cast<double>(bp.m_total) / r.t;
                if (r.last == Centering::Converged || lower > 0.0)
                    throw Infeasible("no strictly feasible point (phase-1 slack " + std::to_string(xs[n]) + ")");
                throw NumericalFailure("phase 1 stalled at slack " + std::to_string(xs[n]));
            }
        }
        x.assign(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n));
    }

    // Phase 2: barrier path following on the original objective.
    {
        const Barrier bp = build(false);
        auto never = [](const Vector&) { return false; };
        const auto r = follow_path(bp, x, o, result.report.phase2_newton, never);
        result.report.outer_iterations = r.outer;
        result.report.gap = static_cast<double>(bp.m_total) / r.t;
        const double obj = dot(bp.c, x);
        if (r.last != Centering::Converged) {
            if (result.report.gap <= o.obj_tol * std::max(1.0, std::abs(obj))) result.report.stalled = true;
            else throw NumericalFailure("Newton stalled with duality gap " + std::to_string(result.report.gap));
        }
        if (norm2(x) > 0.5 * o.radius) throw NumericalFailure("iterate reached the radius bound; problem unbounded");
    }

    result.x.assign(n_all, 0.0);
    for (std::size_t k = 0; k < n; ++k) result.x[free_idx[k]] = x[k];
    result.objective = dot(c_all, result.x);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < problem.blocks().size(); ++j)
        margin = std::min(margin, -max_eigenvalue(problem.evaluate(j, result.x)) - o.eps_feas);
    result.report.min_margin = margin;
    return result;
}

}  // namespace asvobs
