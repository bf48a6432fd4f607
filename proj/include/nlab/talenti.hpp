#pragma once

#include <optional>
#include <vector>

#include "nlab/solver.hpp"

namespace nlab {

struct TalentiRow {
    double eps;
    double p_norm_v = 0;                 // ||v_eps||^p_{W^{1,p}}
    std::optional<double> q_norm_u;      // ||u_eps||^q_{W^{s,q}}
    std::vector<double> lt_norms_v;      // ||v_eps||_{L^t}^t per requested t
    bool resolvable = false;             // eps >= 4h
};

struct TalentiFamily {
    GridPtr grid;
    double r0 = 0;
    double K_Np = 0;
    std::vector<double> t_list;
    std::vector<TalentiRow> rows;
    std::vector<DiscreteField> u_eps;
    std::vector<DiscreteField> v_eps;
};

struct TalentiOptions {
    std::vector<double> t_list{1.1, 3.0};
    bool include_fractional = true;   // the q-norm column is the expensive one
};

TalentiFamily build_family(const ProblemConfig& cfg, GridPtr g,
                           const std::vector<double>& eps_list, double r0,
                           const TalentiOptions& opt = {});

struct SlopeFit {
    double slope = 0;
    double target = 0;
    bool usable = false;
    std::string label;
};

struct SlopeReport {
    std::vector<SlopeFit> fits;       // q-norm, p-norm gap, one per t
    int usable_count = 0;
    double eps_min = 0, eps_max = 0;
};

// Least-squares log-log slopes vs the theoretical exponents. S_p_hat feeds the
// ||v||^p - S_p gap row.
SlopeReport slope_report(const TalentiFamily& fam, const ProblemConfig& cfg, double S_p_hat);

struct SupScanResult {
    double eps = 0;
    double t_argmax = 0;
    double sup_value = 0;
    double level = 0;        // c_inf or C_inf
    bool below = false;
};

SupScanResult sup_scan(const ProblemConfig& cfg, const DiscreteField& v_eps,
                       const Weights& w, const NonlocalAssembly& asm_,
                       double level);

} // namespace nlab
