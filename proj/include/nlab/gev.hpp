#pragma once

#include <vector>

#include "nlab/operators.hpp"

namespace nlab {

// Upper bound for the generalized-eigenvalue threshold curve, evaluated at a
// spectral shift (the problem pairs (lambda, lambda + shift); the fractional
// order stays cfg.s).
double lambda_star_upper_bound(double shift, const DiscreteField& phi, double rho,
                               const ProblemConfig& cfg, const NonlocalAssembly& asm_);

struct GevCurve {
    std::vector<double> shifts;
    std::vector<double> upper_bounds;
    std::string test_function;
    double rho = 1.0;
};

GevCurve gev_curve(const std::vector<double>& shifts, const DiscreteField& phi, double rho,
                   const ProblemConfig& cfg, const NonlocalAssembly& asm_);

struct MonotonicityVerdict {
    bool nonincreasing = false;
    bool shifted_nondecreasing = false;  // U(s) + s nondecreasing
};

MonotonicityVerdict curve_monotonicity(const GevCurve& curve);

struct EigenEstimates {
    double lambda_1p = 0;
    double lambda_1q = 0;
    DiscreteField phi_p;
};

struct ProbeResult {
    bool descent_found = false;
    double t_used = 0;
    double min_energy = 0;
};

// Scans E(t phi_p) over a dyadic t grid in (1e-6, 1].
ProbeResult existence_probe(double alpha, double beta, const ProblemConfig& cfg,
                            const EigenEstimates& eig, const NonlocalAssembly& asm_);

} // namespace nlab
