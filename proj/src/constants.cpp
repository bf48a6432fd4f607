#include "nlab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nlab {

const char* to_string(RayleighTarget t) {
    switch (t) {
        case RayleighTarget::S_rp: return "S_rp";
        case RayleighTarget::S_rq: return "S_rq";
        case RayleighTarget::lambda_1p: return "lambda_1p";
        case RayleighTarget::lambda_1q: return "lambda_1q";
    }
    return "?";
}

namespace {

struct Quotient {
    std::function<double(const DiscreteField&)> num;
    std::function<void(const DiscreteField&, std::vector<double>&)> num_form;  // (1/hom) d num
    std::function<double(const DiscreteField&)> den;
    std::function<void(const DiscreteField&, std::vector<double>&)> den_form;
    double hom_num, hom_den;
};

Quotient make_quotient(RayleighTarget target, const ProblemConfig& cfg, AssemblyPtr asm_) {
    Quotient Qt;
    const double p = cfg.p, q = cfg.q, r = cfg.r;
    switch (target) {
        case RayleighTarget::S_rp:
        case RayleighTarget::lambda_1p: {
            Qt.num = [p](const DiscreteField& u) { return local_p_energy(u, p); };
            Qt.num_form = [p](const DiscreteField& u, std::vector<double>& g) {
                local_p_form(u, p, g);
            };
            Qt.hom_num = p;
            break;
        }
        case RayleighTarget::S_rq:
        case RayleighTarget::lambda_1q: {
            Qt.num = [asm_](const DiscreteField& u) { return asm_->energy(u); };
            Qt.num_form = [asm_](const DiscreteField& u, std::vector<double>& g) {
                asm_->form(u, g);
            };
            Qt.hom_num = q;
            break;
        }
    }
    switch (target) {
        case RayleighTarget::S_rp: {
            // ||u||_{L^r}^p = lt^{p/r}
            Qt.den = [r, p](const DiscreteField& u) { return std::pow(lt_norm(u, r), p / r); };
            Qt.den_form = [r, p](const DiscreteField& u, std::vector<double>& g) {
                const double lt = lt_norm(u, r);
                WeightTable ones(u.grid_ptr(),
                                 std::vector<double>(u.grid().node_count(), 1.0));
                weighted_lt_form(ones, u, r, g);
                const double f = std::pow(lt, p / r - 1);
                for (double& x : g) x *= f;
            };
            Qt.hom_den = p;
            break;
        }
        case RayleighTarget::S_rq: {
            Qt.den = [r, q](const DiscreteField& u) { return std::pow(lt_norm(u, r), q / r); };
            Qt.den_form = [r, q](const DiscreteField& u, std::vector<double>& g) {
                const double lt = lt_norm(u, r);
                WeightTable ones(u.grid_ptr(),
                                 std::vector<double>(u.grid().node_count(), 1.0));
                weighted_lt_form(ones, u, r, g);
                const double f = std::pow(lt, q / r - 1);
                for (double& x : g) x *= f;
            };
            Qt.hom_den = q;
            break;
        }
        case RayleighTarget::lambda_1p: {
            Qt.den = [p](const DiscreteField& u) { return lt_norm(u, p); };
            Qt.den_form = [p](const DiscreteField& u, std::vector<double>& g) {
                WeightTable ones(u.grid_ptr(),
                                 std::vector<double>(u.grid().node_count(), 1.0));
                weighted_lt_form(ones, u, p, g);
            };
            Qt.hom_den = p;
            break;
        }
        case RayleighTarget::lambda_1q: {
            Qt.den = [q](const DiscreteField& u) { return lt_norm(u, q); };
            Qt.den_form = [q](const DiscreteField& u, std::vector<double>& g) {
                WeightTable ones(u.grid_ptr(),
                                 std::vector<double>(u.grid().node_count(), 1.0));
                weighted_lt_form(ones, u, q, g);
            };
            Qt.hom_den = q;
            break;
        }
    }
    return Qt;
}

void normalize(DiscreteField& u) {
    const double n = std::sqrt(dot(u, u));
    if (n > 0) u *= 1.0 / n;
}

struct DescentOutcome {
    double value;
    DiscreteField field;
    int iterations;
    bool stalled;  // stopping rule met (relative progress below tolerance)
};

DescentOutcome descend(const Quotient& Qt, DiscreteField u, int max_iter) {
    normalize(u);
    double E = Qt.num(u), D = Qt.den(u);
    if (!(D > 0)) throw DomainError("rayleigh start has zero denominator");
    double R = E / D;
    std::vector<double> gn, gd, grad(static_cast<std::size_t>(u.size()));
    DiscreteField prev_u;
    std::vector<double> prev_grad;
    double eta = 0;
    std::vector<double> hist{R};
    int it = 0;
    bool stalled = false;
    for (; it < max_iter; ++it) {
        Qt.num_form(u, gn);
        Qt.den_form(u, gd);
        double gnorm2 = 0;
        for (std::size_t k = 0; k < grad.size(); ++k) {
            grad[k] = (Qt.hom_num * gn[k] - R * Qt.hom_den * gd[k]) / D;
            gnorm2 += grad[k] * grad[k];
        }
        if (gnorm2 < 1e-28 * std::max(1.0, R * R)) {
            stalled = true;
            break;
        }
        if (!prev_grad.empty()) {
            double ss = 0, sy = 0;
            for (std::size_t k = 0; k < grad.size(); ++k) {
                const double du = u[static_cast<std::int64_t>(k)]
                                  - prev_u[static_cast<std::int64_t>(k)];
                ss += du * du;
                sy += du * (grad[k] - prev_grad[k]);
            }
            if (sy > 0) eta = std::clamp(ss / sy, 1e-12, 1e12);
        }
        if (eta == 0) eta = 1.0 / std::sqrt(gnorm2);
        double Rmax = R;
        for (std::size_t k = hist.size() > 10 ? hist.size() - 10 : 0; k < hist.size(); ++k)
            Rmax = std::max(Rmax, hist[k]);
        prev_u = u;
        prev_grad = grad;
        double t = eta;
        bool ok = false;
        DiscreteField v;
        double Ev = 0, Dv = 0, Rv = 0;
        for (int bt = 0; bt < 60; ++bt) {
            v = u;
            for (std::int64_t k = 0; k < v.size(); ++k)
                v[k] -= t * grad[static_cast<std::size_t>(k)];
            normalize(v);
            Dv = Qt.den(v);
            if (Dv > 0) {
                Ev = Qt.num(v);
                Rv = Ev / Dv;
                if (Rv <= Rmax - 1e-4 * t * gnorm2) {
                    ok = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!ok) {
            stalled = true;
            break;
        }
        u = v;
        E = Ev;
        D = Dv;
        R = Rv;
        hist.push_back(R);
        if (hist.size() > 30
            && std::abs(hist[hist.size() - 30] - R) < 1e-9 * std::max(std::abs(R), 1e-30)) {
            stalled = true;
            break;
        }
    }
    return {R, std::move(u), it, stalled};
}

} // namespace

RayleighResult rayleigh_minimize_from(RayleighTarget target, GridPtr g,
                                      const ProblemConfig& cfg,
                                      const std::vector<DiscreteField>& starts,
                                      int max_iter) {
    AssemblyPtr asm_;
    if (target == RayleighTarget::S_rq || target == RayleighTarget::lambda_1q)
        asm_ = build_assembly(g, cfg.s, cfg.q);
    const Quotient Qt = make_quotient(target, cfg, asm_);
    RayleighResult best;
    bool have = false, any_converged = false;
    int iters_total = 0;
    for (const auto& u0 : starts) {
        auto out = descend(Qt, u0, max_iter);
        iters_total += out.iterations;
        any_converged = any_converged || out.stalled;
        if (!have || out.value < best.value) {
            best.value = out.value;
            best.minimizer = std::move(out.field);
            have = true;
        }
    }
    best.iterations = iters_total;
    best.starts_used = static_cast<int>(starts.size());
    if (!any_converged)
        throw ConvergenceError("rayleigh_minimize hit max_iter on every start", best.value,
                               iters_total);
    return best;
}

RayleighResult rayleigh_minimize(RayleighTarget target, GridPtr g, const ProblemConfig& cfg,
                                 int starts, int max_iter, unsigned long long seed) {
    AssemblyPtr asm_;
    if (target == RayleighTarget::S_rq || target == RayleighTarget::lambda_1q)
        asm_ = build_assembly(g, cfg.s, cfg.q);
    const Quotient Qt = make_quotient(target, cfg, asm_);

    std::array<double, 3> center{0, 0, 0};
    double min_side = g->side()[0];
    for (int a = 0; a < g->dim(); ++a) {
        center[a] = g->lo()[a] + g->side()[a] / 2;
        min_side = std::min(min_side, g->side()[a]);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.05, 1.0);

    RayleighResult best;
    bool have = false;
    bool any_converged = false;
    int iters_total = 0;
    for (int k = 0; k < starts; ++k) {
        DiscreteField u0(g);
        if (k == 0) {
            u0 = make_bump(g, center, 0.35 * min_side, 1.0);
        } else {
            for (std::int64_t i = 0; i < u0.size(); ++i) u0[i] = unif(rng);
        }
        auto out = descend(Qt, std::move(u0), max_iter);
        iters_total += out.iterations;
        any_converged = any_converged || out.stalled;
        if (!have || out.value < best.value) {
            best.value = out.value;
            best.minimizer = std::move(out.field);
            have = true;
        }
    }
    best.iterations = iters_total;
    best.starts_used = starts;
    if (!any_converged)
        throw ConvergenceError("rayleigh_minimize hit max_iter on every start", best.value,
                               iters_total);
    return best;
}

double lambda0(const ProblemConfig& cfg, double S_rp, double S_rq, double norm_a,
               double norm_b) {
    const double d = cfg.delta, r = cfg.r;
    if (!(S_rp > 0) || !(S_rq > 0) || !(norm_a > 0) || !(norm_b > 0))
        throw DomainError("lambda0 needs positive inputs");
    if (!(r > std::max(cfg.p, cfg.q)) || !(std::max(cfg.p, cfg.q) > d))
        throw DomainError("lambda0 needs r > max{p,q} > delta");
    double best = std::numeric_limits<double>::infinity();
    const double ts[2] = {cfg.p, cfg.q};
    const double Ss[2] = {S_rp, S_rq};
    for (int i = 0; i < 2; ++i) {
        const double t = ts[i], S = Ss[i];
        const double v = std::pow((r - t) / (r - d), (r - t) / (r - d))
                         * std::pow((t - d) * std::pow(S, r / t) / ((r - d) * norm_b),
                                    (t - d) / (r - d))
                         * std::pow(std::pow(S, d / t) / norm_a, (r - t) / (r - d));
        best = std::min(best, v);
    }
    return best;
}

double c_delta(const ProblemConfig& cfg, double S_p, double norm_a_inf, double vol_omega) {
    if (cfg.mode == Mode::subcritical)
        throw ModeError("C_delta is defined in the critical and bn modes");
    if (!(cfg.q < cfg.p)) throw DomainError("C_delta needs q < p");
    if (!(S_p > 0) || !(norm_a_inf > 0) || !(vol_omega > 0))
        throw DomainError("C_delta needs positive inputs");
    const double p = cfg.p, d = cfg.delta, ps = cfg.p_star();
    const double young = std::pow(
        (p / d) * (1 / p - 1 / ps) / (1 / d - 1 / ps), -d / p);
    const double inner = young * norm_a_inf * std::pow(S_p, -d / p)
                         * std::pow(vol_omega, (ps - d) / ps);
    return (1 / d - 1 / ps) * std::pow(inner, p / (p - d));
}

double c_infinity(const ProblemConfig& cfg, double S_p, double C_delta, double lambda) {
    if (cfg.mode == Mode::subcritical)
        throw ModeError("first critical level exists in the critical and bn modes");
    const double N = cfg.dim_N, p = cfg.p, d = cfg.delta;
    if (cfg.mode == Mode::critical)
        return std::pow(S_p / lambda, N / p) / N - C_delta * std::pow(lambda, p / (p - d));
    return std::pow(S_p, N / p) / N - C_delta * std::pow(lambda, p / (p - d));
}

double lambda_critical_threshold(const ProblemConfig& cfg, double S_p, double C_delta) {
    double lo = 1e-12, hi = 1e12;
    if (!(c_infinity(cfg, S_p, C_delta, lo) > 0) || !(c_infinity(cfg, S_p, C_delta, hi) < 0))
        throw BracketError("critical level threshold: no sign change in [1e-12, 1e12]");
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (c_infinity(cfg, S_p, C_delta, mid) > 0) lo = mid;
        else hi = mid;
    }
    return std::sqrt(lo * hi);
}

double lambda_bar0_closed_form(const ProblemConfig& cfg, double S_p, double C_delta) {
    const double N = cfg.dim_N, p = cfg.p, d = cfg.delta;
    return std::pow(std::pow(S_p, N / p) / (N * C_delta), (p - d) / p);
}

double m_exponent(int N, double p, double q, double s) {
    const double first = q * (N - p) / (p * (p - 1));
    const double second = q * (1 - s) + N * (1 - q / p);
    return std::min(first, second);
}

BnWindow bn_window_check(const ProblemConfig& cfg) {
    BnWindow w;
    const double N = cfg.dim_N, p = cfg.p, q = cfg.q, s = cfg.s, d = cfg.delta;
    const double m = m_exponent(cfg.dim_N, p, q, s);
    const double ps = cfg.p_star();
    const double lower1 = std::max(N * p / (m + N - p), ps * (1 - 1 / p));
    w.cond1 = (lower1 < d) && (d < q);
    const double s_bound = 1 - (1 / q) * ((N - p) / (p - 1) - N * (1 - q / p));
    w.cond2 = (d < std::min(q, ps * (1 - 1 / p))) && (s > 0) && (s < s_bound);
    w.admissible = w.cond1 || w.cond2;
    return w;
}

double e_lambda(const EnergyBreakdown& bd, const ProblemConfig& cfg) {
    const double r = cfg.r, d = cfg.delta;
    return (r - cfg.p) / (r - d) * bd.P + (r - cfg.q) / (r - d) * bd.Q - cfg.lambda * bd.A;
}

double sobolev_K_Np(int N, double p) {
    return std::pow(N * std::pow((N - p) / (p - 1), p - 1), (N - p) / (p * p));
}

ConstantsReport compute_constants(const ProblemConfig& cfg, GridPtr g,
                                  unsigned long long seed) {
    ConstantsReport rep;
    rep.grid_n = g->n();
    const Weights w = sample_weights(cfg, g);
    rep.norm_a = std::pow(lt_norm(w.a, cfg.r / (cfg.r - cfg.delta)),
                          (cfg.r - cfg.delta) / cfg.r);
    rep.norm_a_inf = w.a.sup_norm();
    rep.norm_b_inf = w.b.sup_norm();

    rep.S_rp = rayleigh_minimize(RayleighTarget::S_rp, g, cfg, 3, 5000, seed).value;
    rep.S_rq = rayleigh_minimize(RayleighTarget::S_rq, g, cfg, 3, 5000, seed).value;
    rep.lambda_1p = rayleigh_minimize(RayleighTarget::lambda_1p, g, cfg, 3, 5000, seed).value;
    rep.lambda_1q = rayleigh_minimize(RayleighTarget::lambda_1q, g, cfg, 3, 5000, seed).value;

    if (cfg.mode == Mode::subcritical) {
        rep.S_p = rep.S_rp;  // reported as the r-quotient estimate in this mode
    } else {
        rep.S_p = rep.S_rp;  // r = p* in these modes, so S_rp is S_p
    }
    rep.lambda0 = lambda0(cfg, rep.S_rp, rep.S_rq, rep.norm_a, rep.norm_b_inf);
    rep.m_exp = m_exponent(cfg.dim_N, cfg.p, cfg.q, cfg.s);
    rep.K_Np = sobolev_K_Np(cfg.dim_N, cfg.p);

    if (cfg.mode != Mode::subcritical) {
        const double cd = c_delta(cfg, rep.S_p, rep.norm_a_inf, g->box_volume());
        rep.C_delta = cd;
        if (cfg.mode == Mode::critical) {
            rep.c_inf = c_infinity(cfg, rep.S_p, cd, cfg.lambda);
            rep.Lambda0 = lambda_critical_threshold(cfg, rep.S_p, cd);
        } else {
            rep.C_inf = c_infinity(cfg, rep.S_p, cd, cfg.lambda);
            rep.LambdaBar0 = lambda_critical_threshold(cfg, rep.S_p, cd);
            rep.bn_window = bn_window_check(cfg);
        }
    }
    return rep;
}

} // namespace nlab
