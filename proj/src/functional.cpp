#include "nlab/functional.hpp"

#include <cmath>

namespace nlab {

double EnergyBreakdown::scale() const {
    return P + Q + std::abs(A) + std::abs(B);
}

EnergyBreakdown energy_breakdown(const DiscreteField& u, const ProblemConfig& cfg,
                                 const Weights& w, const NonlocalAssembly& asm_) {
    EnergyBreakdown bd;
    bd.P = local_p_energy(u, cfg.p);
    bd.Q = asm_.energy(u);
    bd.A = weighted_lt_integral(w.a, u, cfg.delta);
    bd.B = weighted_lt_integral(w.b, u, cfg.r);
    bd.J = bd.P / cfg.p + bd.Q / cfg.q - cfg.lambda * bd.A / cfg.delta - cfg.c_r() * bd.B / cfg.r;
    return bd;
}

double j_of_t(const EnergyBreakdown& bd, double t, const ProblemConfig& cfg) {
    if (t < 0) throw DomainError("fibering map is defined for t >= 0");
    if (t == 0) return 0.0;
    return std::pow(t, cfg.p) * bd.P / cfg.p + std::pow(t, cfg.q) * bd.Q / cfg.q
           - cfg.lambda * std::pow(t, cfg.delta) * bd.A / cfg.delta
           - cfg.c_r() * std::pow(t, cfg.r) * bd.B / cfg.r;
}

GradientCheckReport gradient_check(const DiscreteField& u, const DiscreteField& phi,
                                   const ProblemConfig& cfg, const Weights& w,
                                   const NonlocalAssembly& asm_, double h_rel) {
    GradientCheckReport rep;
    DiscreteField R = residual_apply(u, cfg, w, asm_);
    rep.pairing = dot(R, phi);

    const double unorm = std::sqrt(dot(u, u));
    const double pnorm = std::sqrt(dot(phi, phi));
    const double step = h_rel * (unorm > 0 ? unorm : 1.0) / (pnorm > 0 ? pnorm : 1.0);
    rep.step = step;

    auto j_at = [&](double a) {
        DiscreteField v = u;
        v.axpy(a, phi);
        return energy_breakdown(v, cfg, w, asm_).J;
    };
    rep.fd_h = (j_at(step) - j_at(-step)) / (2 * step);
    rep.fd_h2 = (j_at(step / 2) - j_at(-step / 2)) / step;
    rep.err_h = std::abs(rep.fd_h - rep.pairing);
    rep.err_h2 = std::abs(rep.fd_h2 - rep.pairing);
    rep.rel_err_h = rep.err_h / std::max(std::abs(rep.pairing), 1e-300);
    rep.ratio = rep.err_h / std::max(rep.err_h2, 1e-300);
    return rep;
}

} // namespace nlab
