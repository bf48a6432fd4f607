#include "nlab/fibering.hpp"

#include <cmath>

namespace nlab {

const char* to_string(FiberingCase c) {
    switch (c) {
        case FiberingCase::BothPositive: return "BothPositive";
        case FiberingCase::ANegBPos: return "ANegBPos";
        case FiberingCase::APosBNeg: return "APosBNeg";
        case FiberingCase::BothNegative: return "BothNegative";
    }
    return "?";
}

GammaDerivatives eval_gamma(const EnergyBreakdown& bd, double t, const ProblemConfig& cfg) {
    if (!(t > 0)) throw DomainError("gamma derivatives need t > 0");
    const double p = cfg.p, q = cfg.q, d = cfg.delta, r = cfg.r;
    const double lam = cfg.lambda, cr = cfg.c_r();
    GammaDerivatives out;
    out.gamma = std::pow(t, p) * bd.P / p + std::pow(t, q) * bd.Q / q
                - lam * std::pow(t, d) * bd.A / d - cr * std::pow(t, r) * bd.B / r;
    out.dgamma = std::pow(t, p - 1) * bd.P + std::pow(t, q - 1) * bd.Q
                 - lam * std::pow(t, d - 1) * bd.A - cr * std::pow(t, r - 1) * bd.B;
    out.ddgamma = (p - 1) * std::pow(t, p - 2) * bd.P + (q - 1) * std::pow(t, q - 2) * bd.Q
                  - lam * (d - 1) * std::pow(t, d - 2) * bd.A
                  - cr * (r - 1) * std::pow(t, r - 2) * bd.B;
    out.m = std::pow(t, p - d) * bd.P + std::pow(t, q - d) * bd.Q
            - cr * std::pow(t, r - d) * bd.B;
    return out;
}

namespace {

double m_value(const EnergyBreakdown& bd, double t, const ProblemConfig& cfg) {
    return std::pow(t, cfg.p - cfg.delta) * bd.P + std::pow(t, cfg.q - cfg.delta) * bd.Q
           - cfg.c_r() * std::pow(t, cfg.r - cfg.delta) * bd.B;
}

double m_derivative(const EnergyBreakdown& bd, double t, const ProblemConfig& cfg) {
    const double pd = cfg.p - cfg.delta, qd = cfg.q - cfg.delta, rd = cfg.r - cfg.delta;
    return pd * std::pow(t, pd - 1) * bd.P + qd * std::pow(t, qd - 1) * bd.Q
           - cfg.c_r() * rd * std::pow(t, rd - 1) * bd.B;
}

constexpr double kBracketCap = 1e9;

} // namespace

FiberingCase classify_case(const EnergyBreakdown& bd, const ProblemConfig& cfg) {
    const double tol = 1e-12 * (bd.P + bd.Q);
    const bool a_pos = bd.A > tol;
    const bool b_pos = cfg.c_r() * bd.B > tol;
    if (a_pos && b_pos) return FiberingCase::BothPositive;
    if (!a_pos && b_pos) return FiberingCase::ANegBPos;
    if (a_pos && !b_pos) return FiberingCase::APosBNeg;
    return FiberingCase::BothNegative;
}

namespace {

// Root of f inside [lo, hi]; bisection tightened by safeguarded Newton.
template <class F, class DF>
double refine_root(F&& f, DF&& df, double lo, double hi, double flo) {
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double ft = f(t);
        if ((ft < 0) == (flo < 0)) lo = t;
        else hi = t;
        if (hi - lo <= 1e-12 * t) break;
        const double dft = df(t);
        double tn = (dft != 0) ? t - ft / dft : 0;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
    }
    return 0.5 * (lo + hi);
}

} // namespace

FiberingReport fibering_roots(const EnergyBreakdown& bd, const ProblemConfig& cfg) {
    FiberingReport rep;
    rep.case_label = classify_case(bd, cfg);
    const double lamA = cfg.lambda * bd.A;
    auto m = [&](double t) { return m_value(bd, t, cfg); };
    auto dm = [&](double t) { return m_derivative(bd, t, cfg); };
    auto groot = [&](double t) { return m(t) - lamA; };

    const double scale = bd.P + bd.Q + std::abs(lamA) + cfg.c_r() * std::abs(bd.B);

    switch (rep.case_label) {
        case FiberingCase::BothNegative:
            return rep;

        case FiberingCase::APosBNeg: {
            // m is increasing from 0 to infinity; unique root with gamma'' > 0
            double lo = 1, hi = 1;
            while (m(lo) > lamA) {
                lo /= 2;
                if (lo < 1.0 / kBracketCap) throw BracketError("fibering: no lower bracket");
            }
            while (m(hi) < lamA) {
                hi *= 2;
                if (hi > kBracketCap) throw BracketError("fibering: no upper bracket");
            }
            const double t1 = refine_root(groot, dm, lo, hi, groot(lo));
            rep.t1 = t1;
            rep.ddgamma_t1 = eval_gamma(bd, t1, cfg).ddgamma;
            return rep;
        }

        case FiberingCase::ANegBPos: {
            // m rises to an interior max then falls to -inf; lamA < 0 is hit once,
            // past the maximum, so the root carries gamma'' < 0
            double hi = 1;
            while (m(hi) > lamA) {
                hi *= 2;
                if (hi > kBracketCap) throw BracketError("fibering: no upper bracket");
            }
            double lo = hi / 2;
            while (m(lo) < lamA) {
                lo /= 2;
                if (lo < 1.0 / kBracketCap) throw BracketError("fibering: no lower bracket");
            }
            const double t1 = refine_root(groot, dm, lo, hi, groot(lo));
            rep.t1 = t1;
            rep.ddgamma_t1 = eval_gamma(bd, t1, cfg).ddgamma;
            return rep;
        }

        case FiberingCase::BothPositive: {
            // unique maximum of m at t_max: bracket the sign change of m'
            double lo = 1, hi = 1;
            while (dm(lo) < 0) {
                lo /= 2;
                if (lo < 1.0 / kBracketCap) throw BracketError("fibering: m' lower bracket");
            }
            while (dm(hi) > 0) {
                hi *= 2;
                if (hi > kBracketCap) throw BracketError("fibering: m' upper bracket");
            }
            double a = lo, b = hi;
            for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
                const double mid = std::sqrt(a * b);
                if (dm(mid) > 0) a = mid;
                else b = mid;
            }
            const double tmax = std::sqrt(a * b);
            rep.t_max = tmax;
            if (m(tmax) <= lamA) {
                rep.no_roots = true;   // lambda too large along this ray
                return rep;
            }
            double l1 = tmax;
            while (m(l1) > lamA) {
                l1 /= 2;
                if (l1 < 1.0 / kBracketCap) throw BracketError("fibering: t1 bracket");
            }
            const double t1 = refine_root(groot, dm, l1, tmax, groot(l1));
            double h2 = tmax;
            while (m(h2) > lamA) {
                h2 *= 2;
                if (h2 > kBracketCap) throw BracketError("fibering: t2 bracket");
            }
            const double t2 = refine_root(groot, dm, tmax, h2, groot(tmax));
            rep.t1 = t1;
            rep.t2 = t2;
            rep.ddgamma_t1 = eval_gamma(bd, t1, cfg).ddgamma;
            rep.ddgamma_t2 = eval_gamma(bd, t2, cfg).ddgamma;
            (void)scale;
            return rep;
        }
    }
    return rep;
}

void sample_gamma(FiberingReport& rep, const EnergyBreakdown& bd, const ProblemConfig& cfg,
                  double t_lo, double t_hi, int count) {
    rep.samples.clear();
    rep.samples.reserve(static_cast<std::size_t>(count));
    const double lr = std::log(t_lo);
    const double ur = std::log(t_hi);
    for (int i = 0; i < count; ++i) {
        const double t = std::exp(lr + (ur - lr) * i / (count - 1));
        const auto gd = eval_gamma(bd, t, cfg);
        rep.samples.push_back({t, gd.gamma, gd.dgamma, gd.ddgamma});
    }
}

} // namespace nlab
