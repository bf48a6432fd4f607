#include "nlab/solver.hpp"

#include <algorithm>
#include <cmath>

namespace nlab {

const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

const char* to_string(SweepOutcome o) {
    switch (o) {
        case SweepOutcome::solved: return "solved";
        case SweepOutcome::empty_branch: return "EmptyBranch";
        case SweepOutcome::no_roots: return "NoRoots";
        case SweepOutcome::no_convergence: return "NoConvergence";
    }
    return "?";
}

namespace {

enum class RootStatus { ok, wrong_case, no_roots };

struct RootLookup {
    RootStatus status = RootStatus::wrong_case;
    double t = 0;
};

// Branch admits a projection root: plus takes the gamma''>0 root, minus the
// gamma''<0 one.
RootLookup branch_root(const FiberingReport& rep, Branch b) {
    switch (rep.case_label) {
        case FiberingCase::BothPositive:
            if (rep.no_roots) return {RootStatus::no_roots, 0};
            return {RootStatus::ok, b == Branch::plus ? *rep.t1 : *rep.t2};
        case FiberingCase::APosBNeg:
            if (b == Branch::plus) return {RootStatus::ok, *rep.t1};
            return {RootStatus::wrong_case, 0};
        case FiberingCase::ANegBPos:
            if (b == Branch::minus) return {RootStatus::ok, *rep.t1};
            return {RootStatus::wrong_case, 0};
        case FiberingCase::BothNegative:
            return {RootStatus::wrong_case, 0};
    }
    return {RootStatus::wrong_case, 0};
}

double residual_sup(const DiscreteField& R) { return R.max_abs(); }

double scaled_residual(const DiscreteField& R, const DiscreteField& u,
                       const EnergyBreakdown& bd, const ProblemConfig& cfg) {
    const double scale = bd.P + bd.Q + cfg.lambda * std::abs(bd.A) + cfg.c_r() * std::abs(bd.B);
    return std::sqrt(dot(R, R)) * std::sqrt(dot(u, u)) / std::max(scale, 1e-300);
}

// quasi-random bump centers for the multi-start pool
double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

struct IterationOutcome {
    RootStatus status = RootStatus::wrong_case;
    DiscreteField u;
    EnergyBreakdown bd;
    int iterations = 0;
    double res_scaled = 0;
    bool converged = false;
};

IterationOutcome run_descent(Branch branch, const ProblemConfig& cfg,
                             const Weights& w, const NonlocalAssembly& asm_,
                             DiscreteField u, const SolverOptions& opt) {
    EnergyBreakdown bd = energy_breakdown(u, cfg, w, asm_);
    {
        auto rep = fibering_roots(bd, cfg);
        auto rt = branch_root(rep, branch);
        if (rt.status != RootStatus::ok) {
            IterationOutcome bad;
            bad.status = rt.status;
            return bad;
        }
        u *= rt.t;
        bd = energy_breakdown(u, cfg, w, asm_);
    }
    DiscreteField prev_u;
    DiscreteField prev_R;
    double eta = 0;
    IterationOutcome out;
    out.status = RootStatus::ok;
    for (int it = 0; it < opt.max_iterations; ++it) {
        DiscreteField R = residual_apply(u, cfg, w, asm_);
        const double nr2 = dot(R, R);
        const double nres = scaled_residual(R, u, bd, cfg);
        if (nres <= opt.tol_residual) {
            out.u = std::move(u);
            out.bd = bd;
            out.iterations = it;
            out.res_scaled = nres;
            out.converged = true;
            return out;
        }
        if (prev_R.size() > 0) {
            double ss = 0, sy = 0;
            for (std::int64_t k = 0; k < u.size(); ++k) {
                const double du = u[k] - prev_u[k];
                ss += du * du;
                sy += du * (R[k] - prev_R[k]);
            }
            if (sy > 0) eta = std::clamp(ss / sy, 1e-14, 1e14);
        }
        if (eta == 0) eta = (bd.P + bd.Q) / std::max(nr2, 1e-300);
        prev_u = u;
        prev_R = R;
        double t = eta;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            DiscreteField v = u;
            v.axpy(-t, R);
            EnergyBreakdown bdv = energy_breakdown(v, cfg, w, asm_);
            auto rep = fibering_roots(bdv, cfg);
            auto rt = branch_root(rep, branch);
            if (rt.status == RootStatus::ok) {
                v *= rt.t;
                EnergyBreakdown bdw = energy_breakdown(v, cfg, w, asm_);
                if (bdw.J <= bd.J - 1e-4 * t * nr2) {
                    u = std::move(v);
                    bd = bdw;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            // no further descent available along -R; report where we stand
            out.u = std::move(u);
            out.bd = bd;
            out.iterations = it;
            out.res_scaled = nres;
            out.converged = nres <= opt.tol_residual;
            return out;
        }
    }
    DiscreteField R = residual_apply(u, cfg, w, asm_);
    out.res_scaled = scaled_residual(R, u, bd, cfg);
    out.converged = out.res_scaled <= opt.tol_residual;
    out.u = std::move(u);
    out.bd = bd;
    out.iterations = opt.max_iterations;
    return out;
}

} // namespace

SolveReport solve_branch(Branch branch, const ProblemConfig& cfg, const Weights& w,
                         const NonlocalAssembly& asm_, const std::vector<DiscreteField>& starts,
                         const SolverOptions& opt) {
    if (!(cfg.lambda > 0)) throw SpecError("solver needs lambda > 0");
    GridPtr g = starts.empty() ? nullptr : starts.front().grid_ptr();
    if (!g) throw SpecError("solver needs at least one start");

    double lam0 = opt.lambda0_hat;
    if (lam0 <= 0) {
        ConstantsReport cr;
        const double S_rp =
            rayleigh_minimize(RayleighTarget::S_rp, g, cfg, 3, 5000, opt.seed).value;
        const double S_rq =
            rayleigh_minimize(RayleighTarget::S_rq, g, cfg, 3, 5000, opt.seed).value;
        const double norm_a = std::pow(lt_norm(w.a, cfg.r / (cfg.r - cfg.delta)),
                                       (cfg.r - cfg.delta) / cfg.r);
        lam0 = lambda0(cfg, S_rp, S_rq, norm_a, w.b.sup_norm());
        (void)cr;
    }
    if (cfg.lambda >= lam0 && !opt.force)
        throw SpecError("lambda = " + std::to_string(cfg.lambda)
                        + " is not below the lambda0 estimate " + std::to_string(lam0)
                        + "; pass force to override");

    bool branch_seen = false;
    bool roots_missing = false;
    std::optional<IterationOutcome> best;
    int start_index = -1, tried = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        ++tried;
        auto res = run_descent(branch, cfg, w, asm_, starts[i], opt);
        if (res.status == RootStatus::no_roots) {
            roots_missing = true;
            continue;
        }
        if (res.status == RootStatus::wrong_case) continue;
        branch_seen = true;
        if (!res.converged) continue;
        if (!best || res.bd.J < best->bd.J) {
            best = std::move(res);
            start_index = static_cast<int>(i);
        }
    }
    if (!branch_seen) {
        if (roots_missing)
            throw BracketError("fibering reports NoRoots on every start: lambda is too large "
                               "along all candidate rays");
        throw EmptyBranch(std::string("no start admits the ") + to_string(branch)
                          + " branch for this weight configuration");
    }
    if (!best)
        throw ConvergenceError("projected descent did not reach the residual tolerance", 0.0,
                               opt.max_iterations);

    // nonnegativity pass: |u| projected back to the branch must not raise J
    SolveReport rep;
    rep.nonnegativized = false;
    if (best->u.min_value() < 0) {
        DiscreteField au = abs_field(best->u);
        EnergyBreakdown bda = energy_breakdown(au, cfg, w, asm_);
        auto frep = fibering_roots(bda, cfg);
        auto rt = branch_root(frep, branch);
        if (rt.status == RootStatus::ok) {
            au *= rt.t;
            EnergyBreakdown bdw = energy_breakdown(au, cfg, w, asm_);
            if (bdw.J <= best->bd.J + 1e-8 * std::max(1.0, std::abs(best->bd.J))) {
                best->u = std::move(au);
                best->bd = bdw;
                rep.nonnegativized = true;
                DiscreteField R = residual_apply(best->u, cfg, w, asm_);
                best->res_scaled = scaled_residual(R, best->u, best->bd, cfg);
            }
        }
    }

    rep.branch = branch;
    rep.J = best->bd.J;
    rep.breakdown = best->bd;
    rep.iterations = best->iterations;
    rep.starts_tried = tried;
    rep.start_index = start_index;
    rep.converged = best->converged;
    rep.lambda0_hat = lam0;
    DiscreteField R = residual_apply(best->u, cfg, w, asm_);
    rep.residual_sup = residual_sup(R);
    rep.residual_scaled = scaled_residual(R, best->u, best->bd, cfg);
    rep.gamma_pp_at_1 = eval_gamma(best->bd, 1.0, cfg).ddgamma;
    rep.e_lambda_value = e_lambda(best->bd, cfg);
    rep.u = std::move(best->u);
    return rep;
}

SolveReport solve_branch(Branch branch, const ProblemConfig& cfg, const Weights& w,
                         const NonlocalAssembly& asm_, const SolverOptions& opt) {
    GridPtr g = asm_.grid_ptr();
    std::array<double, 3> center{0, 0, 0};
    double min_side = g->side()[0];
    for (int a = 0; a < g->dim(); ++a) {
        center[a] = g->lo()[a] + g->side()[a] / 2;
        min_side = std::min(min_side, g->side()[a]);
    }
    std::vector<DiscreteField> starts;
    starts.push_back(make_bump(g, center, 0.3 * min_side, 1.0));
    const int extra = branch == Branch::minus ? opt.minus_starts - 1 : 2;
    const int primes[3] = {2, 3, 5};
    for (int k = 0; k < extra; ++k) {
        std::array<double, 3> c{0, 0, 0};
        for (int a = 0; a < g->dim(); ++a) {
            const double frac = 0.25 + 0.5 * halton(k + 1 + static_cast<int>(opt.seed % 64),
                                                    primes[a]);
            c[a] = g->lo()[a] + frac * g->side()[a];
        }
        starts.push_back(make_bump(g, c, 0.22 * min_side, 1.0));
    }
    return solve_branch(branch, cfg, w, asm_, starts, opt);
}

VerifyReport verify_solution(const SolveReport& rep, const ProblemConfig& cfg,
                             const Weights& w, const NonlocalAssembly& asm_) {
    VerifyReport out;
    if (rep.u.size() == 0 || rep.u.max_abs() == 0) {
        out.items.push_back({"NotOnManifold", false, 0.0, 0.0});
        out.pass = false;
        return out;
    }
    const EnergyBreakdown bd = energy_breakdown(rep.u, cfg, w, asm_);
    const DiscreteField R = residual_apply(rep.u, cfg, w, asm_);
    const double scale = bd.scale();

    const double res = scaled_residual(R, rep.u, bd, cfg);
    out.items.push_back({"residual_scaled", res <= 10 * 1e-6, res, 1e-5});

    const auto gd = eval_gamma(bd, 1.0, cfg);
    const double gtol = 1e-8 * scale;
    out.items.push_back({"gamma_prime_at_1", std::abs(gd.dgamma) <= gtol, gd.dgamma, gtol});

    const bool sign_ok = rep.branch == Branch::plus ? gd.ddgamma > 0 : gd.ddgamma < 0;
    out.items.push_back({"gamma_pp_sign", sign_ok, gd.ddgamma, 0.0});

    const double min_u = rep.u.min_value();
    const double max_u = rep.u.max_value();
    const bool nonneg = min_u >= -1e-10 * std::max(max_u, 0.0);
    out.items.push_back({"nonnegative", nonneg, min_u, -1e-10 * std::max(max_u, 0.0)});

    const double el = e_lambda(bd, cfg);
    const bool el_ok = std::abs(el) > 1e-8 * (bd.P + bd.Q);
    out.items.push_back({"e_lambda_nonzero", el_ok, el, 1e-8 * (bd.P + bd.Q)});

    out.pass = true;
    for (const auto& item : out.items) out.pass = out.pass && item.pass;
    return out;
}

std::vector<SweepRecord> lambda_sweep(const ProblemConfig& cfg, const Weights& w,
                                      const NonlocalAssembly& asm_,
                                      const std::vector<double>& lambdas,
                                      const std::vector<Branch>& branches,
                                      const SolverOptions& opt) {
    if (lambdas.empty()) throw SpecError("lambda sweep needs a nonempty grid");
    for (double l : lambdas)
        if (!(l > 0)) throw SpecError("lambda sweep entries must be positive");

    // shared lambda0 estimate (exponents do not change across the sweep)
    GridPtr g = asm_.grid_ptr();
    ProblemConfig base = cfg;
    const double S_rp = rayleigh_minimize(RayleighTarget::S_rp, g, base, 3, 5000, opt.seed).value;
    const double S_rq = rayleigh_minimize(RayleighTarget::S_rq, g, base, 3, 5000, opt.seed).value;
    const double norm_a =
        std::pow(lt_norm(w.a, cfg.r / (cfg.r - cfg.delta)), (cfg.r - cfg.delta) / cfg.r);
    const double lam0 = lambda0(cfg, S_rp, S_rq, norm_a, w.b.sup_norm());

    std::vector<SweepRecord> out;
    for (double lam : lambdas) {
        for (Branch b : branches) {
            ProblemConfig c = cfg;
            c.lambda = lam;
            SweepRecord recd;
            recd.lambda = lam;
            recd.branch = b;
            recd.above_lambda0 = lam > lam0;
            SolverOptions o = opt;
            o.force = true;  // the sweep records outcomes instead of refusing
            o.lambda0_hat = lam0;
            try {
                SolveReport rep = solve_branch(b, c, w, asm_, o);
                recd.outcome = rep.converged ? SweepOutcome::solved : SweepOutcome::no_convergence;
                recd.J = rep.J;
                recd.P = rep.breakdown.P;
                recd.Q = rep.breakdown.Q;
                recd.residual_scaled = rep.residual_scaled;
            } catch (const EmptyBranch&) {
                recd.outcome = SweepOutcome::empty_branch;
            } catch (const BracketError&) {
                recd.outcome = SweepOutcome::no_roots;
            } catch (const ConvergenceError&) {
                recd.outcome = SweepOutcome::no_convergence;
            }
            out.push_back(recd);
        }
    }
    return out;
}

} // namespace nlab
