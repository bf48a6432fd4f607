#pragma once

#include <optional>

#include "nlab/fibering.hpp"

namespace nlab {

enum class RayleighTarget { S_rp, S_rq, lambda_1p, lambda_1q };
const char* to_string(RayleighTarget t);

struct RayleighResult {
    double value = 0;
    DiscreteField minimizer;
    int iterations = 0;
    int starts_used = 0;
};

// Normalized projected descent on the Rayleigh quotient (BB steps, Armijo
// safeguard), best of `starts` starts. Throws ConvergenceError with the best
// value reached if no start settles within max_iter.
RayleighResult rayleigh_minimize(RayleighTarget target, GridPtr g, const ProblemConfig& cfg,
                                 int starts = 3, int max_iter = 5000,
                                 unsigned long long seed = 1);

// Same minimization from caller-provided starts; rejects degenerate starts
// with a zero denominator.
RayleighResult rayleigh_minimize_from(RayleighTarget target, GridPtr g,
                                      const ProblemConfig& cfg,
                                      const std::vector<DiscreteField>& starts,
                                      int max_iter = 5000);

// Threshold of Lemma-level N_lambda^0 emptiness: min over t in {p,q}.
double lambda0(const ProblemConfig& cfg, double S_rp, double S_rq, double norm_a,
               double norm_b);

double c_delta(const ProblemConfig& cfg, double S_p, double norm_a_inf, double vol_omega);

// First critical level c_inf (critical mode) / C_inf (bn mode) at lambda.
double c_infinity(const ProblemConfig& cfg, double S_p, double C_delta, double lambda);
// Largest lambda with c_infinity positive, by bisection on [1e-12, 1e12].
double lambda_critical_threshold(const ProblemConfig& cfg, double S_p, double C_delta);
// Closed form of the BN threshold.
double lambda_bar0_closed_form(const ProblemConfig& cfg, double S_p, double C_delta);

double m_exponent(int N, double p, double q, double s);

struct BnWindow {
    bool cond1 = false;
    bool cond2 = false;
    bool admissible = false;
};
BnWindow bn_window_check(const ProblemConfig& cfg);

// Diagnostic E_lambda(u) from the breakdown.
double e_lambda(const EnergyBreakdown& bd, const ProblemConfig& cfg);

struct ConstantsReport {
    int grid_n = 0;
    double S_rp = 0, S_rq = 0, S_p = 0;
    double lambda_1p = 0, lambda_1q = 0;
    double norm_a = 0;       // ||a||_{r/(r-delta)}
    double norm_a_inf = 0;
    double norm_b_inf = 0;
    double lambda0 = 0;
    std::optional<double> C_delta;
    std::optional<double> c_inf;      // critical mode
    std::optional<double> C_inf;      // bn mode
    std::optional<double> Lambda0;    // critical mode threshold
    std::optional<double> LambdaBar0; // bn mode threshold
    double m_exp = 0;
    std::optional<BnWindow> bn_window;
    double K_Np = 0;
};

ConstantsReport compute_constants(const ProblemConfig& cfg, GridPtr g,
                                  unsigned long long seed = 1);

double sobolev_K_Np(int N, double p);

} // namespace nlab
