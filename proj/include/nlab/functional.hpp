#pragma once

#include "nlab/operators.hpp"

namespace nlab {

// The four homogeneous terms of J_lambda plus the assembled value. Everything
// the fibering analysis needs is a function of (P, Q, A, B) alone.
struct EnergyBreakdown {
    double P = 0;  // ||u||^p_{W^{1,p}_0}
    double Q = 0;  // ||u||^q_{W^{s,q}_0}
    double A = 0;  // int a |u|^delta
    double B = 0;  // int b |u|^r
    double J = 0;  // P/p + Q/q - lambda A/delta - c_r B/r
    double scale() const;  // positive magnitude used for scale-free tolerances
};

EnergyBreakdown energy_breakdown(const DiscreteField& u, const ProblemConfig& cfg,
                                 const Weights& w, const NonlocalAssembly& asm_);

// gamma_u(t) = J_lambda(t u) from the breakdown of u.
double j_of_t(const EnergyBreakdown& bd, double t, const ProblemConfig& cfg);

struct GradientCheckReport {
    double pairing = 0;        // <residual_apply(u), phi>
    double fd_h = 0, fd_h2 = 0;
    double err_h = 0, err_h2 = 0;      // absolute errors vs pairing
    double rel_err_h = 0;
    double ratio = 0;          // err_h / err_h2 (4 expected for second order)
    double step = 0;
};

GradientCheckReport gradient_check(const DiscreteField& u, const DiscreteField& phi,
                                   const ProblemConfig& cfg, const Weights& w,
                                   const NonlocalAssembly& asm_, double h_rel = 1e-4);

} // namespace nlab
