#include <doctest.h>

#include <cmath>
#include <random>

#include "nlab/constants.hpp"

using namespace nlab;

namespace {

// Second, independently coded evaluators: everything composed through
// logarithms so the arithmetic path differs from the implementation.
double lambda0_log_form(double p, double q, double d, double r, double Srp, double Srq,
                        double na, double nb) {
    auto branch = [&](double t, double S) {
        const double e1 = (r - t) / (r - d);
        const double e2 = (t - d) / (r - d);
        double acc = e1 * (std::log(r - t) - std::log(r - d));
        acc += e2 * (std::log(t - d) + (r / t) * std::log(S) - std::log(r - d) - std::log(nb));
        acc += e1 * ((d / t) * std::log(S) - std::log(na));
        return std::exp(acc);
    };
    return std::min(branch(p, Srp), branch(q, Srq));
}

double c_delta_log_form(int N, double p, double d, double Sp, double na, double vol) {
    const double ps = N * p / (N - p);
    const double c1 = 1 / d - 1 / ps;
    const double young_log = (-d / p)
        * (std::log(p / d) + std::log(1 / p - 1 / ps) - std::log(c1));
    const double inner_log = young_log + std::log(na) - (d / p) * std::log(Sp)
                             + ((ps - d) / ps) * std::log(vol);
    return c1 * std::exp((p / (p - d)) * inner_log);
}

double c_inf_log_form(int N, double p, double d, double Sp, double Cd, double lam,
                      bool bn_mode) {
    const double first = bn_mode ? std::exp((N / p) * std::log(Sp)) / N
                                 : std::exp((N / p) * (std::log(Sp) - std::log(lam))) / N;
    return first - Cd * std::exp((p / (p - d)) * std::log(lam));
}

double m_exp_log(int N, double p, double q, double s) {
    return std::min(std::exp(std::log(q) + std::log(N - p) - std::log(p) - std::log(p - 1)),
                    q * (1 - s) + N * (1 - q / p));
}

} // namespace

TEST_CASE("m exponent spot values") {
    CHECK(m_exponent(2, 1.5, 1.2, 0.5) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(m_exponent(2, 1.5, 1.2, 0.4) == doctest::Approx(0.8).epsilon(1e-14));
    // raising s lowers only the second branch
    const double lo = m_exponent(2, 1.5, 1.2, 0.9);
    CHECK(lo == doctest::Approx(1.2 * 0.1 + 2 * (1 - 0.8)).epsilon(1e-12));
}

TEST_CASE("K_{N,p} closed form") {
    CHECK(sobolev_K_Np(2, 1.5) == doctest::Approx(std::pow(2.0, 2.0 / 9.0)).epsilon(1e-14));
}

TEST_CASE("lambda0 frozen value and algebraic structure") {
    ProblemConfig cfg;
    CHECK(lambda0(cfg, 1, 1, 1, 1) == doctest::Approx(0.529133683989399825).epsilon(1e-12));
    // strictly increasing in S_rp with everything else fixed
    CHECK(lambda0(cfg, 1.3, 1, 1, 1) > lambda0(cfg, 1.0, 1, 1, 1));
    // doubling ||a|| scales the p-branch by 2^{-(r-p)/(r-delta)}; isolate the
    // p-branch by making the q-branch huge
    const double only_p = lambda0(cfg, 1.0, 100.0, 1.0, 1.0);
    const double only_p_2a = lambda0(cfg, 1.0, 100.0, 2.0, 1.0);
    CHECK(only_p_2a / only_p == doctest::Approx(std::pow(2.0, -1.5 / 1.8)).epsilon(1e-12));
    CHECK_THROWS_AS(lambda0(cfg, -1, 1, 1, 1), DomainError);
}

TEST_CASE("C_delta frozen value and scaling law") {
    ProblemConfig cfg;
    cfg.mode = Mode::critical;
    cfg.p = 1.5;
    cfg.q = 1.2;
    cfg.delta = 1.1;
    cfg.r = cfg.p_star();
    const double cd = c_delta(cfg, 1.0, 1.0, 1.0);
    CHECK(cd == doctest::Approx(0.9383329168039757).epsilon(1e-12));
    CHECK(cd > 0);
    const double cd2 = c_delta(cfg, 1.0, 2.0, 1.0);
    CHECK(cd2 / cd == doctest::Approx(std::pow(2.0, cfg.p / (cfg.p - cfg.delta))).epsilon(1e-12));
    ProblemConfig sub;
    CHECK_THROWS_AS(c_delta(sub, 1.0, 1.0, 1.0), ModeError);
}

TEST_CASE("first critical level: frozen value and monotone blowup at small lambda") {
    ProblemConfig cfg;
    cfg.mode = Mode::critical;
    cfg.p = 1.5;
    cfg.q = 1.2;
    cfg.delta = 1.1;
    cfg.r = cfg.p_star();
    const double cd = c_delta(cfg, 1.0, 1.0, 1.0);
    CHECK(c_infinity(cfg, 1.0, cd, 0.1) == doctest::Approx(10.77200658834885).epsilon(1e-12));
    double prev = -1e300;
    for (double lam : {0.5, 0.2, 0.1, 0.02, 0.004}) {
        const double v = c_infinity(cfg, 1.0, cd, lam);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("bn threshold: closed form matches bisection to 1e-8") {
    ProblemConfig cfg;
    cfg.mode = Mode::bn;
    cfg.p = 1.5;
    cfg.q = 1.2;
    cfg.delta = 1.1;
    cfg.r = cfg.p_star();
    const double cd = c_delta(cfg, 1.3, 1.0, 1.0);
    const double closed = lambda_bar0_closed_form(cfg, 1.3, cd);
    const double bisected = lambda_critical_threshold(cfg, 1.3, cd);
    CHECK(std::abs(closed - bisected) <= 1e-8 * closed);
    // the returned threshold brackets the sign change
    CHECK(c_infinity(cfg, 1.3, cd, 0.99 * bisected) > 0);
    CHECK(std::abs(c_infinity(cfg, 1.3, cd, bisected)) <= 1e-6);
}

TEST_CASE("bn window spot checks") {
    ProblemConfig cfg;
    cfg.mode = Mode::bn;
    cfg.dim_N = 2;
    cfg.p = 1.5;
    cfg.q = 1.2;
    cfg.delta = 1.1;
    cfg.s = 0.4;
    cfg.r = cfg.p_star();
    auto w = bn_window_check(cfg);
    CHECK(w.cond2);
    CHECK(w.admissible);
    cfg.s = 0.5;  // the bound evaluates to exactly 0.5; strict inequality fails
    w = bn_window_check(cfg);
    CHECK(!w.cond2);
    ProblemConfig c5;
    c5.mode = Mode::bn;
    c5.dim_N = 5;
    c5.p = 2.0;
    c5.q = 1.9;
    c5.s = 0.1;
    c5.delta = 1.85;
    c5.r = c5.p_star();
    CHECK(!bn_window_check(c5).cond1);
}

TEST_CASE("constant evaluators agree with the log-composed second evaluator") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int draw = 0; draw < 50; ++draw) {
        // admissible critical-style parameters
        const double p = 1.3 + 0.55 * U(rng);
        const double q = 1.05 + (p - 1.06) * U(rng);
        const double N = 2;
        const double s = 0.05 + U(rng) * std::min(0.9, 0.9 / q - 0.05);
        const double d = 1.01 + (std::min(p, q) - 1.02) * U(rng);
        const double ps = N * p / (N - p);
        const double r = std::max(p, q) + (ps - std::max(p, q)) * U(rng);
        const double Srp = 0.5 + 2 * U(rng), Srq = 0.5 + 2 * U(rng);
        const double na = 0.5 + U(rng), nb = 0.5 + U(rng);

        ProblemConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.s = s;
        cfg.delta = d;
        cfg.r = r;
        CHECK(lambda0(cfg, Srp, Srq, na, nb)
              == doctest::Approx(lambda0_log_form(p, q, d, r, Srp, Srq, na, nb)).epsilon(1e-10));
        CHECK(m_exponent(2, p, q, s)
              == doctest::Approx(m_exp_log(2, p, q, s)).epsilon(1e-10));
    }
}

TEST_CASE("c_delta cross-check on 50 admissible draws") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int draw = 0; draw < 50; ++draw) {
        const double p = 1.35 + 0.5 * U(rng);
        const double q = 1.05 + (p - 1.1) * U(rng);
        const double d = 1.01 + (q - 1.02) * U(rng);
        const double Sp = 0.5 + 2 * U(rng);
        const double na = 0.5 + U(rng);
        const double vol = 0.5 + U(rng);
        ProblemConfig cfg;
        cfg.mode = Mode::critical;
        cfg.p = p;
        cfg.q = q;
        cfg.delta = d;
        cfg.r = cfg.p_star();
        const double mine = c_delta(cfg, Sp, na, vol);
        const double other = c_delta_log_form(2, p, d, Sp, na, vol);
        CHECK(mine == doctest::Approx(other).epsilon(1e-10));
        const double lam = 0.01 + U(rng);
        CHECK(c_infinity(cfg, Sp, mine, lam)
              == doctest::Approx(c_inf_log_form(2, p, d, Sp, mine, lam, false)).epsilon(1e-10));
        cfg.mode = Mode::bn;
        CHECK(c_infinity(cfg, Sp, mine, lam)
              == doctest::Approx(c_inf_log_form(2, p, d, Sp, mine, lam, true)).epsilon(1e-10));
    }
}

TEST_CASE("e_lambda diagnostic") {
    ProblemConfig cfg;
    EnergyBreakdown bd;
    CHECK(e_lambda(bd, cfg) == 0.0);
    bd.P = 2;
    bd.Q = 3;
    bd.A = 1;
    ProblemConfig c0 = cfg;
    c0.lambda = 0;
    CHECK(e_lambda(bd, c0) > 0);
    const double expect = (cfg.r - cfg.p) / (cfg.r - cfg.delta) * 2
                          + (cfg.r - cfg.q) / (cfg.r - cfg.delta) * 3 - cfg.lambda * 1;
    CHECK(e_lambda(bd, cfg) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("lab-mode p=2 eigenvalue approaches 2 pi^2 from above") {
    ProblemConfig cfg;
    cfg.strictness = Strictness::lab;
    cfg.p = 2.0;
    cfg.grid_n = 64;
    auto g = build_grid(cfg);
    auto res = rayleigh_minimize(RayleighTarget::lambda_1p, g, cfg, 1, 5000, 1);
    const double target = 2 * M_PI * M_PI;
    CHECK(res.value == doctest::Approx(target).epsilon(0.02));
    CHECK(res.value >= target - 1e-8);
}

TEST_CASE("eigenvalue estimates decrease under refinement") {
    ProblemConfig cfg;
    cfg.strictness = Strictness::lab;
    cfg.p = 2.0;
    double prev = 1e300;
    for (int n : {16, 32}) {
        cfg.grid_n = n;
        auto g = build_grid(cfg);
        auto res = rayleigh_minimize(RayleighTarget::lambda_1p, g, cfg, 1, 5000, 1);
        CHECK(res.value <= prev + 1e-8);
        prev = res.value;
    }
}

TEST_CASE("rayleigh rejects a zero start") {
    ProblemConfig cfg;
    cfg.grid_n = 8;
    auto g = build_grid(cfg);
    std::vector<DiscreteField> starts{DiscreteField(g)};
    CHECK_THROWS_AS(rayleigh_minimize_from(RayleighTarget::lambda_1p, g, cfg, starts),
                    DomainError);
}

TEST_CASE("rayleigh value is invariant under start scaling") {
    ProblemConfig cfg;
    cfg.grid_n = 16;
    auto g = build_grid(cfg);
    auto b = make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0);
    DiscreteField b2 = b;
    b2 *= 37.0;
    auto r1 = rayleigh_minimize_from(RayleighTarget::lambda_1p, g, cfg, {b});
    auto r2 = rayleigh_minimize_from(RayleighTarget::lambda_1p, g, cfg, {b2});
    CHECK(r1.value == doctest::Approx(r2.value).epsilon(1e-6));
}

TEST_CASE("constants report carries the grid and mode-dependent fields") {
    ProblemConfig cfg;
    cfg.grid_n = 12;
    auto g = build_grid(cfg);
    auto rep = compute_constants(cfg, g, 1);
    CHECK(rep.grid_n == 12);
    CHECK(rep.S_rp > 0);
    CHECK(rep.S_rq > 0);
    CHECK(rep.lambda_1p > 0);
    CHECK(rep.lambda_1q > 0);
    CHECK(rep.lambda0 > 0);
    CHECK(!rep.C_delta);  // subcritical mode has no critical-level constants
    CHECK(!rep.Lambda0);
}
