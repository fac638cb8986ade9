#pragma once

// Small dense semidefinite programs of the form
//   minimise cᵀx  subject to  F_j(x) = F_j0 + Σ_i x_i F_ji ⪯ 0  for every block j,
// solved by a log-det barrier path-following method with a slack phase 1.

#include <string>
#include <utility>
#include <vector>

#include "asvobs/numerics.hpp"

namespace asvobs {

struct LmiBlock {
    std::string name;
    SymMatrix constant;                                   // F_j0
    std::vector<std::pair<std::size_t, SymMatrix>> terms;  // (i, F_ji), sparse in i

    [[nodiscard]] std::size_t dim() const { return constant.dim(); }
};

class LmiProblem {
public:
    LmiProblem() = default;
    explicit LmiProblem(std::size_t n_vars) : c_(n_vars, 0.0) {}

    [[nodiscard]] std::size_t n_vars() const { return c_.size(); }
    [[nodiscard]] const Vector& objective() const { return c_; }
    void set_objective(std::size_t i, double ci) { c_.at(i) = ci; }

    /// Adds a block with constant term `f0`; returns its index.
    std::size_t add_block(std::string name, SymMatrix f0);
    /// Accumulates x_i·f into block `block` (terms for the same i are summed).
    void add_term(std::size_t block, std::size_t i, const SymMatrix& f);

    [[nodiscard]] const std::vector<LmiBlock>& blocks() const { return blocks_; }
    [[nodiscard]] const LmiBlock& block(const std::string& name) const;
    [[nodiscard]] SymMatrix evaluate(std::size_t block, std::span<const double> x) const;
    /// Throws std::invalid_argument on shape errors or non-finite data.
    void validate() const;

private:
    Vector c_;
    std::vector<LmiBlock> blocks_;
};

struct SolverOptions {
    double eps_feas = 1e-6;    // each block must satisfy F_j(x) ⪯ −eps_feas·I
    double gap_tol = 1e-8;     // m_total / t at which path following stops
    double obj_tol = 1e-4;     // relative duality-gap bound accepted if Newton stalls earlier
    double mu = 10.0;          // barrier parameter growth per outer step
    double radius = 1e15;      // ‖x‖ bound that keeps phase 1 and unbounded problems compact
    int max_newton = 100;      // per centering
    int max_outer = 60;
};

struct SolverReport {
    int phase1_newton = 0;
    int phase2_newton = 0;
    int outer_iterations = 0;
    double gap = 0.0;          // m_total / t at exit
    double min_margin = 0.0;   // min_j λ_min(−F_j(x)) − eps_feas
    bool stalled = false;      // Newton stalled but the gap was already within obj_tol
};

struct SdpResult {
    Vector x;
    double objective = 0.0;
    SolverReport report;
};

/// Throws Infeasible when phase 1 cannot reach a strictly feasible point,
/// NumericalFailure when Newton breaks down or the iterate runs to the radius bound.
SdpResult solve_sdp(const LmiProblem& problem, const SolverOptions& options = {});

}  // namespace asvobs
