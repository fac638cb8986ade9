#include "asvobs/lmi_synthesis.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "asvobs/observer_model.hpp"
#include "asvobs/vessel_model.hpp"

namespace asvobs {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SymMatrix sym(const Matrix& m) { return SymMatrix::symmetrized(m); }

// Unit symmetric matrix with ones at (i,j) and (j,i).
Matrix unit_sym(std::size_t n, std::size_t i, std::size_t j) {
    Matrix e(n, n);
    e(i, j) = 1.0;
    e(j, i) = 1.0;
    return e;
}

Matrix unit(std::size_t r, std::size_t c, std::size_t i, std::size_t j) {
    Matrix e(r, c);
    e(i, j) = 1.0;
    return e;
}

// Symmetric block matrix [[0, X], [Xᵀ, 0]] with X placed at (r0, c0).
Matrix off_diagonal(std::size_t n, std::size_t r0, std::size_t c0, const Matrix& x) {
    Matrix m(n, n);
    m.set_block(r0, c0, x);
    m.set_block(c0, r0, x.transpose());
    return m;
}

struct Builder {
    SynthesisProblem& p;

    // Adds the Lyapunov-type block Aᵀ P + P A + CᵀWᵀ + W C + shift·P + constant.
    void lyapunov_block(const std::string& name, const Matrix& a, const Matrix& c, double p_shift,
                        const Matrix& constant) {
        const std::size_t n = p.n_state;
        const auto b = p.lmi.add_block(name, sym(constant));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const Matrix e = unit_sym(n, i, j);
                p.lmi.add_term(b, p.p_index(i, j), sym(a.transpose() * e + e * a + e * p_shift));
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p.n_out; ++j) {
                const Matrix wc = unit(n, p.n_out, i, j) * c;
                p.lmi.add_term(b, p.w_index(i, j), sym(wc + wc.transpose()));
            }
    }

    void p_floor(const std::string& name, double level) {
        const std::size_t n = p.n_state;
        const auto b = p.lmi.add_block(name, SymMatrix(Matrix::identity(n) * level));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) p.lmi.add_term(b, p.p_index(i, j), sym(unit_sym(n, i, j) * -1.0));
    }

    // [[−βI_n, P·pb, W·wk, ...], [*, −βI, ...]] with optional P·pb and W columns, all scaled by `scale`.
    void norm_block(const std::string& name, const Matrix* pb, double pk, bool with_w, double wk, double scale) {
        const std::size_t n = p.n_state;
        const std::size_t cp = pb ? pb->cols() : 0;
        const std::size_t cw = with_w ? p.n_out : 0;
        const std::size_t dim = n + cp + cw;
        const auto b = p.lmi.add_block(name, SymMatrix(dim));
        p.lmi.add_term(b, p.beta_index(), SymMatrix(Matrix::identity(dim) * -scale));
        if (pb)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) {
                    const Matrix pbij = unit_sym(n, i, j) * *pb * (pk * scale);
                    if (!pbij.is_zero()) p.lmi.add_term(b, p.p_index(i, j), sym(off_diagonal(dim, 0, n, pbij)));
                }
        if (with_w)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < p.n_out; ++j)
                    p.lmi.add_term(b, p.w_index(i, j),
                                   sym(off_diagonal(dim, 0, n + cp, unit(n, p.n_out, i, j) * (wk * scale))));
    }
};

}  // namespace

void SynthesisConfig::validate() const {
    const double v[] = {delta_psi1, delta_p1, k_omega_p, k_n_p, r_min, r_max, p_min, gain_reg, eps_feas};
    if (!all_finite(v)) throw InvalidConfig("synthesis parameters must be finite");
    if (delta_psi1 < 0.0 || delta_p1 < 0.0) throw InvalidConfig("delta must be >= 0");
    if (k_omega_p < 0.0 || k_n_p < 0.0) throw InvalidConfig("k_omega_p and k_n_p must be >= 0");
    if (k_omega_p == 0.0 && k_n_p == 0.0) throw InvalidConfig("k_omega_p and k_n_p cannot both be zero");
    if (!(r_min <= 0.0 && 0.0 <= r_max)) throw InvalidConfig("need r_min <= 0 <= r_max");
    if (p_min < 0.0 || gain_reg < 0.0) throw InvalidConfig("p_min and gain_reg must be >= 0");
    if (!(eps_feas > 0.0)) throw InvalidConfig("eps_feas must be > 0");
    if (M.dim() != 3) throw InvalidConfig("M must be 3x3");
    try {
        cholesky(M);
    } catch (const NotPositiveDefinite&) {
        throw InvalidConfig("M must be positive definite");
    } catch (const NonFinite&) {
        throw InvalidConfig("M must be finite");
    }
}

std::string canonical_text(const SynthesisConfig& c) {
    std::ostringstream os;
    os << "delta_psi1 " << fmt17(c.delta_psi1) << "\n"
       << "delta_p1 " << fmt17(c.delta_p1) << "\n"
       << "k_omega_p " << fmt17(c.k_omega_p) << "\n"
       << "k_n_p " << fmt17(c.k_n_p) << "\n"
       << "r_min " << fmt17(c.r_min) << "\n"
       << "r_max " << fmt17(c.r_max) << "\n"
       << "p_min " << fmt17(c.p_min) << "\n"
       << "gain_reg " << fmt17(c.gain_reg) << "\n"
       << "eps_feas " << fmt17(c.eps_feas) << "\n"
       << "M";
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) os << " " << fmt17(c.M(i, j));
    os << "\n";
    return os.str();
}

std::uint64_t config_hash(const SynthesisConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_text(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::size_t SynthesisProblem::p_index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    // Row-major upper triangle.
    return i * n_state - i * (i - 1) / 2 + (j - i);
}

SynthesisProblem build_rotational_problem(const SynthesisConfig& config) {
    config.validate();
    SynthesisProblem p{ProgramKind::Rotational, config, LmiProblem(10), 3, 1};
    p.lmi.set_objective(p.beta_index(), 1.0);
    Builder b{p};
    const Matrix a = model::A_psi();
    const Matrix c = model::C_psi();
    const Matrix bw = model::B_omega_psi();
    b.p_floor("positive_definite", config.eps_feas);
    b.lyapunov_block("stability", a, c, 0.0, Matrix::identity(3));
    b.norm_block("disturbance_bound", &bw, 1.0, false, 0.0, 1.0);
    b.lyapunov_block("pole_placement", a, c, 2.0 * config.delta_psi1, Matrix(3, 3));
    if (config.p_min > 0.0) b.p_floor("p_floor", config.p_min);
    if (config.gain_reg > 0.0) b.norm_block("gain_bound", nullptr, 0.0, true, config.gain_reg, 1.0);
    return p;
}

SynthesisProblem build_positional_problem(const SynthesisConfig& config) {
    config.validate();
    SynthesisProblem p{ProgramKind::Positional, config, LmiProblem(34), 6, 2};
    p.lmi.set_objective(p.beta_index(), 1.0);
    Builder b{p};
    const Matrix a0 = model::A0_p();
    const Matrix c = model::C_p();
    const Matrix bw = model::B_omega_p();
    const Matrix st = model::S_Tp();
    const double kw = config.k_omega_p;
    const double kn = config.k_n_p;
    const double scale = 1.0 / std::max({1.0, kw, kn});
    b.p_floor("positive_definite", config.eps_feas);
    b.lyapunov_block("stability_r_min", a0 + st * config.r_min, c, 0.0, Matrix::identity(6));
    b.lyapunov_block("stability_r_max", a0 + st * config.r_max, c, 0.0, Matrix::identity(6));
    b.norm_block("tradeoff_bound", &bw, kw, true, kn, scale);
    b.lyapunov_block("pole_placement_r_min", a0 + st * config.r_min, c, 2.0 * config.delta_p1, Matrix(6, 6));
    b.lyapunov_block("pole_placement_r_max", a0 + st * config.r_max, c, 2.0 * config.delta_p1, Matrix(6, 6));
    if (config.p_min > 0.0) b.p_floor("p_floor", config.p_min);
    const double g = config.gain_reg * std::max(kw, kn);
    if (g > 0.0 && kn == 0.0) b.norm_block("gain_bound", nullptr, 0.0, true, g, scale);
    if (g > 0.0 && kw == 0.0) b.norm_block("disturbance_gain_bound", &bw, g, false, 0.0, scale);
    return p;
}

SymMatrix unpack_P(const SynthesisProblem& p, std::span<const double> x) {
    SymMatrix P(p.n_state);
    for (std::size_t i = 0; i < p.n_state; ++i)
        for (std::size_t j = i; j < p.n_state; ++j) P.set(i, j, x[p.p_index(i, j)]);
    return P;
}

Matrix unpack_W(const SynthesisProblem& p, std::span<const double> x) {
    Matrix W(p.n_state, p.n_out);
    for (std::size_t i = 0; i < p.n_state; ++i)
        for (std::size_t j = 0; j < p.n_out; ++j) W(i, j) = x[p.w_index(i, j)];
    return W;
}

Vector pack(const SynthesisProblem& p, const SymMatrix& P, const Matrix& W, double beta) {
    if (P.dim() != p.n_state || W.rows() != p.n_state || W.cols() != p.n_out)
        throw std::invalid_argument("pack: shape mismatch");
    Vector x(p.lmi.n_vars(), 0.0);
    for (std::size_t i = 0; i < p.n_state; ++i)
        for (std::size_t j = i; j < p.n_state; ++j) x[p.p_index(i, j)] = P(i, j);
    for (std::size_t i = 0; i < p.n_state; ++i)
        for (std::size_t j = 0; j < p.n_out; ++j) x[p.w_index(i, j)] = W(i, j);
    x[p.beta_index()] = beta;
    return x;
}

Vector extract_rotational_gain(const RotationalSolution& sol) {
    Vector l = solve_linear(sol.P.matrix(), sol.W);
    for (double& v : l) v = -v;
    return l;
}

RotationalSolution rotational_solution(const SynthesisProblem& p, std::span<const double> x) {
    if (p.kind != ProgramKind::Rotational) throw std::invalid_argument("not a rotational problem");
    RotationalSolution s;
    s.P = unpack_P(p, x);
    s.W = unpack_W(p, x).col(0);
    s.beta = x[p.beta_index()];
    s.L = extract_rotational_gain(s);
    return s;
}

PositionalSolution positional_solution(const SynthesisProblem& p, std::span<const double> x) {
    if (p.kind != ProgramKind::Positional) throw std::invalid_argument("not a positional problem");
    return {unpack_P(p, x), unpack_W(p, x), x[p.beta_index()]};
}

Transformation transformation(double psi) { return {model::T_p(psi), model::T_p_inv(psi)}; }

Matrix positional_gain_z(const PositionalSolution& sol) { return solve_linear(sol.P.matrix(), sol.W); }

Matrix positional_gain(const PositionalSolution& sol, double psi) {
    return model::T_p_inv(psi) * positional_gain_z(sol) * rotation2(psi).transpose() * -1.0;
}

Matrix rotational_error_matrix(const RotationalSolution& sol) {
    const Matrix lz = solve_linear(sol.P.matrix(), Matrix::column(sol.W));
    return model::A_psi() + lz * model::C_psi();
}

Matrix positional_error_matrix(const PositionalSolution& sol, double r) {
    return model::A0_p() + model::S_Tp() * r + positional_gain_z(sol) * model::C_p();
}

VerificationReport verify_solution(const SynthesisProblem& p, std::span<const double> x, const VerifyTolerance& tol) {
    VerificationReport rep;
    rep.kind = p.kind;
    if (x.size() != p.lmi.n_vars() || !all_finite(x)) {
        rep.pass = false;
        return rep;
    }
    bool ok = true;
    const double limit = -p.config.eps_feas + tol.block;
    for (std::size_t j = 0; j < p.lmi.blocks().size(); ++j) {
        const double me = max_eigenvalue(p.lmi.evaluate(j, x));
        const bool pass = me <= limit;
        ok = ok && pass;
        rep.blocks.push_back({p.lmi.blocks()[j].name, me, pass});
    }
    const SymMatrix P = unpack_P(p, x);
    rep.lambda_min_P = min_eigenvalue(P);
    if (!(rep.lambda_min_P > 0.0)) {
        rep.pass = false;
        return rep;
    }
    try {
        if (p.kind == ProgramKind::Rotational) {
            const RotationalSolution s = rotational_solution(p, x);
            const double a = spectral_abscissa(rotational_error_matrix(s));
            const double lim = -p.config.delta_psi1 + tol.pole;
            rep.poles.push_back({0.0, a, lim, a <= lim});
            ok = ok && a <= lim;
        } else {
            const PositionalSolution s = positional_solution(p, x);
            const double lim = -p.config.delta_p1 + tol.pole;
            for (double r : {p.config.r_min, 0.0, p.config.r_max}) {
                const double a = spectral_abscissa(positional_error_matrix(s, r));
                rep.poles.push_back({r, a, lim, a <= lim});
                ok = ok && a <= lim;
            }
        }
    } catch (const std::exception&) {
        ok = false;
    }
    rep.pass = ok;
    return rep;
}

void print_report(std::ostream& os, const VerificationReport& r) {
    os << (r.kind == ProgramKind::Rotational ? "rotational" : "positional") << " certificate: "
       << (r.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& b : r.blocks)
        os << "  block " << b.name << " max_eig " << fmt17(b.max_eigenvalue) << (b.pass ? " ok" : " FAIL") << "\n";
    os << "  lambda_min(P) " << fmt17(r.lambda_min_P) << (r.lambda_min_P > 0.0 ? " ok" : " FAIL") << "\n";
    for (const auto& p : r.poles)
        os << "  poles r=" << fmt17(p.r) << " abscissa " << fmt17(p.abscissa) << " limit " << fmt17(p.limit)
           << (p.pass ? " ok" : " FAIL") << "\n";
}

SynthesisResult synthesize(ProgramKind kind, const SynthesisConfig& config, const SolverOptions& opts) {
    SynthesisProblem p =
        kind == ProgramKind::Rotational ? build_rotational_problem(config) : build_positional_problem(config);
    SolverOptions o = opts;
    // Interior margin twice the certified one so rounding in large blocks cannot flip a check.
    o.eps_feas = 2.0 * config.eps_feas;
    SdpResult r = solve_sdp(p.lmi, o);
    VerificationReport rep = verify_solution(p, r.x);
    return {std::move(p), std::move(r), std::move(rep)};
}

SynthesisOutput synthesize_all(const SynthesisConfig& config, const SolverOptions& opts) {
    const SynthesisResult rot = synthesize(ProgramKind::Rotational, config, opts);
    const SynthesisResult pos = synthesize(ProgramKind::Positional, config, opts);
    SynthesisOutput out;
    out.gains.config = config;
    out.gains.rot = rotational_solution(rot.problem, rot.sdp.x);
    out.gains.pos = positional_solution(pos.problem, pos.sdp.x);
    out.rot_report = rot.report;
    out.pos_report = pos.report;
    return out;
}

GainsVerification verify_gains(const ObserverGains& g, const VerifyTolerance& tol) {
    const SynthesisProblem rp = build_rotational_problem(g.config);
    const SynthesisProblem pp = build_positional_problem(g.config);
    GainsVerification out;
    out.rot = verify_solution(rp, pack(rp, g.rot.P, Matrix::column(g.rot.W), g.rot.beta), tol);
    out.pos = verify_solution(pp, pack(pp, g.pos.P, g.pos.W, g.pos.beta), tol);
    return out;
}

namespace {

void check_theta(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidTheta("theta must lie in (0, 1)");
}

double condition_factor(const SymMatrix& P) {
    const Vector ev = sym_eigenvalues(P);
    if (!(ev.front() > 0.0)) throw NotPositiveDefinite("iss_bound: P is not positive definite");
    return std::sqrt(ev.back() / ev.front());
}

}  // namespace

double iss_bound(const RotationalSolution& sol, double theta, const SignalBounds& b) {
    check_theta(theta);
    if (b.omega < 0.0) throw std::invalid_argument("signal bounds must be >= 0");
    const double pb = spectral_norm(sol.P.matrix() * model::B_omega_psi());
    return condition_factor(sol.P) * 2.0 * pb * b.omega / theta;
}

double iss_bound(const PositionalSolution& sol, const SynthesisConfig& c, double theta, const SignalBounds& b) {
    check_theta(theta);
    if (b.omega < 0.0 || b.noise < 0.0) throw std::invalid_argument("signal bounds must be >= 0");
    const double kw = c.k_omega_p > 0.0 ? c.k_omega_p : 1.0;
    const double kn = c.k_n_p > 0.0 ? c.k_n_p : 1.0;
    Matrix ups(6, 4);
    ups.set_block(0, 0, sol.P.matrix() * model::B_omega_p() * kw);
    ups.set_block(0, 2, sol.W * kn);
    const double g = std::hypot(b.omega / kw, b.noise / kn);
    return condition_factor(sol.P) * 2.0 * spectral_norm(ups) * g / theta;
}

namespace {

void write_matrix(std::ostream& os, const std::string& label, const Matrix& m) {
    os << label << " " << m.rows() << " " << m.cols() << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt17(m(i, j));
        os << "\n";
    }
}

}  // namespace

void write_gains(std::ostream& os, const ObserverGains& g) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash(g.config));
    os << "# observer gains\n";
    os << "config_hash " << hash << "\n";
    std::istringstream cfg(canonical_text(g.config));
    for (std::string line; std::getline(cfg, line);) os << "config " << line << "\n";
    write_matrix(os, "P_psi", g.rot.P.matrix());
    write_matrix(os, "W_psi", Matrix::column(g.rot.W));
    write_matrix(os, "L_psi", Matrix::column(g.rot.L));
    write_matrix(os, "beta_psi", Matrix{{g.rot.beta}});
    write_matrix(os, "P_p", g.pos.P.matrix());
    write_matrix(os, "W_p", g.pos.W);
    write_matrix(os, "beta_p", Matrix{{g.pos.beta}});
}

void write_gains_file(const std::string& path, const ObserverGains& g) {
    std::ostringstream os;
    write_gains(os, g);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp + " for writing");
        f << os.str();
        if (!f.flush()) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp + " to " + path);
}

namespace {

double parse_double(const std::string& s, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'", line);
    }
    if (pos != s.size()) throw ParseError("not a number: '" + s + "'", line);
    return v;
}

}  // namespace

LoadedGains read_gains(std::istream& is) {
    LoadedGains out;
    std::map<std::string, Matrix> mats;
    std::map<std::string, std::vector<double>> cfg;
    bool have_hash = false;
    int line_no = 0;
    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "config_hash") {
            std::string h;
            ls >> h;
            try {
                std::size_t pos = 0;
                out.hash = std::stoull(h, &pos, 16);
                if (pos != h.size() || h.size() != 16) throw std::invalid_argument(h);
            } catch (const std::exception&) {
                throw ParseError("bad config_hash", line_no);
            }
            have_hash = true;
        } else if (key == "config") {
            std::string name, tok;
            ls >> name;
            std::vector<double> vals;
            while (ls >> tok) vals.push_back(parse_double(tok, line_no));
            if (name.empty() || vals.empty()) throw ParseError("malformed config line", line_no);
            cfg[name] = vals;
        } else {
            std::size_t r = 0, c = 0;
            if (!(ls >> r >> c) || r == 0 || c == 0 || r > 64 || c > 64)
                throw ParseError("expected '<label> <rows> <cols>'", line_no);
            Matrix m(r, c);
            for (std::size_t i = 0; i < r; ++i) {
                if (!std::getline(is, line)) throw ParseError("truncated matrix " + key, line_no);
                ++line_no;
                std::istringstream rs(line);
                std::string tok;
                for (std::size_t j = 0; j < c; ++j) {
                    if (!(rs >> tok)) throw ParseError("short row in " + key, line_no);
                    m(i, j) = parse_double(tok, line_no);
                }
                if (rs >> tok) throw ParseError("long row in " + key, line_no);
            }
            mats[key] = m;
        }
    }
    if (!have_hash) throw ParseError("missing config_hash");
    auto scalar = [&](const std::string& k) {
        auto it = cfg.find(k);
        if (it == cfg.end() || it->second.size() != 1) throw ParseError("missing config " + k);
        return it->second[0];
    };
    auto mat = [&](const std::string& k, std::size_t r, std::size_t c) {
        auto it = mats.find(k);
        if (it == mats.end()) throw ParseError("missing matrix " + k);
        if (it->second.rows() != r || it->second.cols() != c) throw ParseError("wrong shape for " + k);
        return it->second;
    };
    SynthesisConfig& c = out.gains.config;
    c.delta_psi1 = scalar("delta_psi1");
    c.delta_p1 = scalar("delta_p1");
    c.k_omega_p = scalar("k_omega_p");
    c.k_n_p = scalar("k_n_p");
    c.r_min = scalar("r_min");
    c.r_max = scalar("r_max");
    c.p_min = scalar("p_min");
    c.gain_reg = scalar("gain_reg");
    c.eps_feas = scalar("eps_feas");
    auto mit = cfg.find("M");
    if (mit == cfg.end() || mit->second.size() != 9) throw ParseError("missing config M");
    Matrix m(3, 3);
    std::copy(mit->second.begin(), mit->second.end(), m.data().begin());
    try {
        c.M = SymMatrix(m);
    } catch (const std::invalid_argument&) {
        throw ParseError("config M is not symmetric");
    }
    auto sym_or_throw = [](const Matrix& a, const std::string& k) {
        try {
            return SymMatrix(a);
        } catch (const std::invalid_argument&) {
            throw ParseError(k + " is not symmetric");
        }
    };
    out.gains.rot.P = sym_or_throw(mat("P_psi", 3, 3), "P_psi");
    out.gains.rot.W = mat("W_psi", 3, 1).col(0);
    out.gains.rot.L = mat("L_psi", 3, 1).col(0);
    out.gains.rot.beta = mat("beta_psi", 1, 1)(0, 0);
    out.gains.pos.P = sym_or_throw(mat("P_p", 6, 6), "P_p");
    out.gains.pos.W = mat("W_p", 6, 2);
    out.gains.pos.beta = mat("beta_p", 1, 1)(0, 0);
    return out;
}

LoadedGains read_gains_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open gains file " + path);
    return read_gains(f);
}

}  // namespace asvobs
