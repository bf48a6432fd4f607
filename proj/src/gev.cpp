#include "nlab/gev.hpp"

#include <cmath>

namespace nlab {

double lambda_star_upper_bound(double shift, const DiscreteField& phi, double rho,
                               const ProblemConfig& cfg, const NonlocalAssembly& asm_) {
    if (!(rho > 0)) throw DomainError("upper bound needs rho > 0");
    if (!(cfg.p < cfg.q))
        throw DomainError("the generalized eigenvalue bound needs p < q");
    if (phi.min_value() < 0) throw DomainError("test function must be nonnegative");
    if (phi.max_abs() == 0) throw DomainError("test function must not vanish identically");

    DiscreteField pw(phi.grid_ptr());
    const double e = cfg.q / cfg.p;
    for (std::int64_t k = 0; k < phi.size(); ++k) pw[k] = std::pow(phi[k], e);

    const double num = local_p_energy(pw, cfg.p) / rho + asm_.energy(phi);
    const double den = lt_norm(phi, cfg.q);
    return num / den + std::max(0.0, -shift);
}

GevCurve gev_curve(const std::vector<double>& shifts, const DiscreteField& phi, double rho,
                   const ProblemConfig& cfg, const NonlocalAssembly& asm_) {
    GevCurve c;
    c.shifts = shifts;
    c.rho = rho;
    c.test_function = "user";
    // the shift enters the bound through max{0,-s} only; evaluate the field part once
    const double base = lambda_star_upper_bound(0.0, phi, rho, cfg, asm_);
    for (double s : shifts) c.upper_bounds.push_back(base + std::max(0.0, -s));
    return c;
}

MonotonicityVerdict curve_monotonicity(const GevCurve& curve) {
    if (curve.shifts.size() < 2)
        throw SpecError("monotonicity check needs at least two curve points");
    MonotonicityVerdict v;
    v.nonincreasing = true;
    v.shifted_nondecreasing = true;
    for (std::size_t i = 0; i + 1 < curve.shifts.size(); ++i) {
        const double slack = 1e-12 * (1 + std::abs(curve.upper_bounds[i]));
        if (curve.upper_bounds[i + 1] > curve.upper_bounds[i] + slack) v.nonincreasing = false;
        const double left = curve.upper_bounds[i] + curve.shifts[i];
        const double right = curve.upper_bounds[i + 1] + curve.shifts[i + 1];
        if (right < left - slack) v.shifted_nondecreasing = false;
    }
    return v;
}

ProbeResult existence_probe(double alpha, double beta, const ProblemConfig& cfg,
                            const EigenEstimates& eig, const NonlocalAssembly& asm_) {
    const double pp = lt_norm(eig.phi_p, cfg.p);
    const double qq = lt_norm(eig.phi_p, cfg.q);
    const double wq = asm_.energy(eig.phi_p);
    const double cp = (eig.lambda_1p - alpha) * pp / cfg.p;
    const double cq = (wq - beta * qq) / cfg.q;

    ProbeResult out;
    out.min_energy = std::numeric_limits<double>::infinity();
    for (double t = 1.0; t > 1e-6; t /= 2) {
        const double e = cp * std::pow(t, cfg.p) + cq * std::pow(t, cfg.q);
        if (e < out.min_energy) {
            out.min_energy = e;
            out.t_used = t;
        }
        if (e < 0) {
            out.descent_found = true;
            out.t_used = t;
            out.min_energy = e;
            break;
        }
    }
    return out;
}

} // namespace nlab
