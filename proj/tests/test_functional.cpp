#include <doctest.h>

#include <cmath>
#include <random>

#include "nlab/functional.hpp"

using namespace nlab;

namespace {

struct Fixture {
    ProblemConfig cfg;
    GridPtr g;
    Weights w;
    AssemblyPtr asm_;

    explicit Fixture(int n = 12, double lambda = 0.4) {
        cfg.grid_n = n;
        cfg.lambda = lambda;
        g = build_grid(cfg);
        w = sample_weights(cfg, g);
        asm_ = build_assembly(g, cfg.s, cfg.q);
    }
};

DiscreteField random_field(GridPtr g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    DiscreteField u(g);
    for (std::int64_t k = 0; k < u.size(); ++k) u[k] = nd(rng);
    return u;
}

} // namespace

TEST_CASE("breakdown of the zero field is all zeros") {
    Fixture f;
    DiscreteField u(f.g);
    auto bd = energy_breakdown(u, f.cfg, f.w, *f.asm_);
    CHECK(bd.P == 0);
    CHECK(bd.Q == 0);
    CHECK(bd.A == 0);
    CHECK(bd.B == 0);
    CHECK(bd.J == 0);
}

TEST_CASE("positive bump with unit weights has positive A and B") {
    Fixture f;
    auto u = make_bump(f.g, {0.5, 0.5, 0}, 0.3, 1.0);
    auto bd = energy_breakdown(u, f.cfg, f.w, *f.asm_);
    CHECK(bd.A > 0);
    CHECK(bd.B > 0);
}

TEST_CASE("J reassembles from its parts") {
    Fixture f;
    auto u = random_field(f.g, 2);
    auto bd = energy_breakdown(u, f.cfg, f.w, *f.asm_);
    const double again = bd.P / f.cfg.p + bd.Q / f.cfg.q - f.cfg.lambda * bd.A / f.cfg.delta
                         - f.cfg.c_r() * bd.B / f.cfg.r;
    CHECK(bd.J == doctest::Approx(again).epsilon(1e-12));
}

TEST_CASE("bn mode keeps lambda only on the sublinear term") {
    Fixture f;
    ProblemConfig bn = f.cfg;
    bn.mode = Mode::bn;
    bn.p = 1.5;
    bn.q = 1.2;
    bn.r = bn.p_star();
    auto asm2 = build_assembly(f.g, bn.s, bn.q);
    auto u = make_bump(f.g, {0.5, 0.5, 0}, 0.3, 1.0);
    auto bd = energy_breakdown(u, bn, f.w, *asm2);
    const double expect = bd.P / bn.p + bd.Q / bn.q - bn.lambda * bd.A / bn.delta - bd.B / bn.r;
    CHECK(bd.J == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("fibering values: endpoints and domain guard") {
    Fixture f;
    auto u = make_bump(f.g, {0.55, 0.45, 0}, 0.3, 1.0);
    auto bd = energy_breakdown(u, f.cfg, f.w, *f.asm_);
    CHECK(j_of_t(bd, 0.0, f.cfg) == 0.0);
    CHECK(j_of_t(bd, 1.0, f.cfg) == doctest::Approx(bd.J).epsilon(1e-14));
    CHECK_THROWS_AS(j_of_t(bd, -0.5, f.cfg), DomainError);
}

TEST_CASE("j_of_t equals the energy of the scaled field") {
    Fixture f;
    auto u = random_field(f.g, 9);
    auto bd = energy_breakdown(u, f.cfg, f.w, *f.asm_);
    for (double t : {0.3, 1.7, 4.2}) {
        DiscreteField v = u;
        v *= t;
        auto bdt = energy_breakdown(v, f.cfg, f.w, *f.asm_);
        CHECK(j_of_t(bd, t, f.cfg) == doctest::Approx(bdt.J).epsilon(1e-10));
    }
}

TEST_CASE("all four terms are homogeneous to 1e-12 relative") {
    Fixture f;
    auto u = random_field(f.g, 4);
    auto bd1 = energy_breakdown(u, f.cfg, f.w, *f.asm_);
    const double t = 2.3;
    DiscreteField v = u;
    v *= t;
    auto bdt = energy_breakdown(v, f.cfg, f.w, *f.asm_);
    CHECK(bdt.P == doctest::Approx(std::pow(t, f.cfg.p) * bd1.P).epsilon(1e-12));
    CHECK(bdt.Q == doctest::Approx(std::pow(t, f.cfg.q) * bd1.Q).epsilon(1e-12));
    CHECK(bdt.A == doctest::Approx(std::pow(t, f.cfg.delta) * bd1.A).epsilon(1e-12));
    CHECK(bdt.B == doctest::Approx(std::pow(t, f.cfg.r) * bd1.B).epsilon(1e-12));
}

TEST_CASE("gradient check on random pairs: second order in the step") {
    Fixture f(10);
    auto u = random_field(f.g, 21);
    auto phi = random_field(f.g, 22);
    auto rep = gradient_check(u, phi, f.cfg, f.w, *f.asm_, 1e-4);
    CHECK(rep.rel_err_h <= 1e-4);
    CHECK(rep.ratio >= 3.2);
    CHECK(rep.ratio <= 4.8);
}

TEST_CASE("zero direction pairs to zero") {
    Fixture f(8);
    auto u = random_field(f.g, 5);
    DiscreteField phi(f.g);
    auto R = residual_apply(u, f.cfg, f.w, *f.asm_);
    CHECK(dot(R, phi) == 0.0);
}

TEST_CASE("gradient check passes with lambda = 0") {
    Fixture f(10, 0.0);
    f.cfg.strictness = Strictness::lab;
    auto u = random_field(f.g, 31);
    auto phi = random_field(f.g, 32);
    auto rep = gradient_check(u, phi, f.cfg, f.w, *f.asm_, 1e-4);
    CHECK(rep.rel_err_h <= 1e-4);
    CHECK(rep.ratio >= 3.2);
    CHECK(rep.ratio <= 4.8);
}

TEST_CASE("d/dt J(tu) at t=1 equals the residual pairing") {
    Fixture f;
    auto u = random_field(f.g, 44);
    auto bd = energy_breakdown(u, f.cfg, f.w, *f.asm_);
    auto R = residual_apply(u, f.cfg, f.w, *f.asm_);
    const double dgamma = bd.P + bd.Q - f.cfg.lambda * bd.A - f.cfg.c_r() * bd.B;
    CHECK(dot(R, u) == doctest::Approx(dgamma).epsilon(1e-10));
}
