#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlab/constants.hpp"

namespace nlab {

enum class Branch { plus, minus };
const char* to_string(Branch b);

struct EmptyBranch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    double tol_residual = 1e-6;
    int max_iterations = 10000;
    int minus_starts = 8;
    unsigned long long seed = 1;
    bool deterministic = false;
    bool force = false;        // bypass the lambda < lambda0_hat refusal
    double lambda0_hat = 0;    // 0 = compute internally
};

struct SolveReport {
    Branch branch = Branch::plus;
    DiscreteField u;
    EnergyBreakdown breakdown;
    double J = 0;
    double residual_sup = 0;
    double residual_scaled = 0;
    double gamma_pp_at_1 = 0;
    int iterations = 0;
    int starts_tried = 0;
    int start_index = -1;      // which start produced the accepted result
    bool nonnegativized = false;
    bool converged = false;
    double lambda0_hat = 0;
    double e_lambda_value = 0;
};

SolveReport solve_branch(Branch branch, const ProblemConfig& cfg, const Weights& w,
                         const NonlocalAssembly& asm_, const std::vector<DiscreteField>& starts,
                         const SolverOptions& opt);

// Convenience: default multi-start construction for the branch.
SolveReport solve_branch(Branch branch, const ProblemConfig& cfg, const Weights& w,
                         const NonlocalAssembly& asm_, const SolverOptions& opt);

struct VerifyItem {
    std::string name;
    bool pass;
    double value;
    double tolerance;
};

struct VerifyReport {
    bool pass = false;
    std::vector<VerifyItem> items;
};

VerifyReport verify_solution(const SolveReport& rep, const ProblemConfig& cfg,
                             const Weights& w, const NonlocalAssembly& asm_);

enum class SweepOutcome { solved, empty_branch, no_roots, no_convergence };
const char* to_string(SweepOutcome o);

struct SweepRecord {
    double lambda;
    Branch branch;
    SweepOutcome outcome;
    double J = 0;
    double P = 0, Q = 0;
    double residual_scaled = 0;
    bool above_lambda0 = false;
};

std::vector<SweepRecord> lambda_sweep(const ProblemConfig& cfg, const Weights& w,
                                      const NonlocalAssembly& asm_,
                                      const std::vector<double>& lambdas,
                                      const std::vector<Branch>& branches,
                                      const SolverOptions& opt);

} // namespace nlab
