#include <doctest.h>

#include <cmath>
#include <random>

#include "nlab/operators.hpp"

using namespace nlab;

namespace {

GridPtr unit_square(int n) { return build_grid(2, {0, 0, 0}, {1, 1, 1}, n); }

DiscreteField sine_interpolant(GridPtr g) {
    DiscreteField u(g);
    for (std::int64_t k = 0; k < u.size(); ++k) {
        auto x = g->interior_coord(k);
        u[k] = std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
    }
    return u;
}

DiscreteField random_field(GridPtr g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    DiscreteField u(g);
    for (std::int64_t k = 0; k < u.size(); ++k) u[k] = nd(rng);
    return u;
}

WeightTable ones_table(GridPtr g) {
    return WeightTable(g, std::vector<double>(static_cast<std::size_t>(g->node_count()), 1.0));
}

} // namespace

TEST_CASE("local energy of the zero field vanishes") {
    auto g = unit_square(8);
    DiscreteField u(g);
    CHECK(local_p_energy(u, 1.5) == 0.0);
}

TEST_CASE("local energy is p-homogeneous") {
    auto g = unit_square(12);
    auto u = make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0);
    const double p = 1.5;
    const double e1 = local_p_energy(u, p);
    DiscreteField v = u;
    v *= 3.0;
    const double e3 = local_p_energy(v, p);
    CHECK(e3 == doctest::Approx(std::pow(3.0, p) * e1).epsilon(1e-12));
}

TEST_CASE("Dirichlet energy of the sine interpolant matches pi^2/2") {
    auto g = unit_square(32);
    auto u = sine_interpolant(g);
    const double target = M_PI * M_PI / 2;
    CHECK(local_p_energy(u, 2.0) == doctest::Approx(target).epsilon(0.01));
}

TEST_CASE("L^t quadrature integrates the unit function exactly") {
    auto g = unit_square(16);
    CHECK(lt_norm(ones_table(g), 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lt_norm(ones_table(g), 3.7) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("L^t norm scales as |c|^t") {
    auto g = unit_square(12);
    auto u = make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0);
    const double t = 2.6;
    const double base = lt_norm(u, t);
    DiscreteField v = u;
    v *= -2.0;
    CHECK(lt_norm(v, t) == doctest::Approx(std::pow(2.0, t) * base).epsilon(1e-12));
}

TEST_CASE("L^2 norm of the sine interpolant is 1/4") {
    auto g = unit_square(32);
    auto u = sine_interpolant(g);
    CHECK(lt_norm(u, 2.0) == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("tail coefficient closed forms") {
    CHECK(tail_coefficient(1.0, 0.5, 1.8, 2) == doctest::Approx(2 * M_PI / 0.9).epsilon(1e-12));
    CHECK(tail_coefficient(1.0, 0.5, 1.2, 3) == doctest::Approx(4 * M_PI / 0.6).epsilon(1e-12));
    const double sq = 0.9;
    const double r1 = tail_coefficient(1.0, 0.5, 1.8, 2);
    const double r2 = tail_coefficient(2.0, 0.5, 1.8, 2);
    CHECK(r1 / r2 == doctest::Approx(std::pow(2.0, sq)).epsilon(1e-12));
    CHECK_THROWS_AS(tail_coefficient(0.0, 0.5, 1.8, 2), SpecError);
}

TEST_CASE("assembly rejects s*q >= 1") {
    auto g = unit_square(8);
    CHECK_THROWS_AS(build_assembly(g, 0.9, 1.8), AssemblyError);
}

TEST_CASE("pair weights are symmetric and positive") {
    auto g = unit_square(8);
    auto a = build_assembly(g, 0.5, 1.8);
    const std::int64_t M = g->interior_count();
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> pick(0, M - 1);
    for (int it = 0; it < 200; ++it) {
        const std::int64_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        const double wij = a->pair_weight(i, j);
        CHECK(wij > 0);
        CHECK(wij == a->pair_weight(j, i));
    }
    for (std::int64_t i = 0; i < M; ++i) CHECK(a->tau(i) > 0);
}

TEST_CASE("gagliardo energy: zero field, positivity, homogeneity") {
    auto g = unit_square(12);
    auto a = build_assembly(g, 0.5, 1.8);
    DiscreteField z(g);
    CHECK(a->energy(z) == 0.0);

    auto u = make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0);
    const double e = a->energy(u);
    CHECK(e > 0);
    DiscreteField v = u;
    v *= 2.0;
    CHECK(a->energy(v) == doctest::Approx(std::pow(2.0, 1.8) * e).epsilon(1e-12));
}

TEST_CASE("gagliardo energy vanishes only on the zero field") {
    auto g = unit_square(6);
    auto a = build_assembly(g, 0.5, 1.8);
    DiscreteField u(g);
    u[3] = 1e-3;
    CHECK(a->energy(u) > 0);
}

TEST_CASE("assembly and field grids must match") {
    auto g1 = unit_square(8);
    auto g2 = unit_square(8);
    auto a = build_assembly(g1, 0.5, 1.8);
    DiscreteField u(g2);
    CHECK_THROWS_AS(a->energy(u), AssemblyError);
}

TEST_CASE("gagliardo refinement is Cauchy within 2% between n=32 and n=64") {
    // high-resolution-reference style check on a fixed bump
    double q32 = 0, q64 = 0;
    {
        auto g = unit_square(32);
        auto a = build_assembly(g, 0.5, 1.8);
        q32 = a->energy(make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0));
    }
    {
        auto g = unit_square(64);
        auto a = build_assembly(g, 0.5, 1.8);
        q64 = a->energy(make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0));
    }
    CHECK(std::abs(q64 - q32) / q64 <= 0.02);
}

TEST_CASE("exterior coefficient bounded by inscribed and circumscribed tails") {
    auto g = unit_square(8);
    auto a = build_assembly(g, 0.5, 1.8);
    for (std::int64_t i = 0; i < g->interior_count(); ++i) {
        auto x = g->interior_coord(i);
        const double half = g->h(0) / 2;
        const double din = std::min({x[0] - half, 1 - half - x[0], x[1] - half,
                                     1 - half - x[1]});
        const double dout = std::hypot(std::max(x[0] - half, 1 - half - x[0]),
                                       std::max(x[1] - half, 1 - half - x[1]));
        CHECK(a->tau(i) <= tail_coefficient(din, 0.5, 1.8, 2) * (1 + 1e-9));
        CHECK(a->tau(i) >= tail_coefficient(dout, 0.5, 1.8, 2) * (1 - 1e-9));
    }
}

TEST_CASE("exterior coefficients match the polar-quadrature oracle") {
    // reference values from the radial form (1/sq) int rho(theta)^{-sq} dtheta
    // over the exact padded-box complement
    auto g = unit_square(4);
    auto a = build_assembly(g, 0.5, 1.8);
    CHECK(a->tau(g->interior_rank({2, 2, 0}))
          == doctest::Approx(15.34876132969782).epsilon(1e-12));
    CHECK(a->tau(g->interior_rank({1, 1, 0}))
          == doctest::Approx(27.959015182008727).epsilon(1e-12));
    CHECK(a->tau(g->interior_rank({1, 3, 0}))
          == doctest::Approx(27.959015182008727).epsilon(1e-12));

    auto a2 = build_assembly(g, 0.05, 1.01);
    CHECK(a2->tau(g->interior_rank({2, 2, 0}))
          == doctest::Approx(130.01472424552796).epsilon(1e-11));
}

TEST_CASE("3d exterior coefficients match the spherical-quadrature oracle") {
    auto g = build_grid(3, {0, 0, 0}, {1, 1, 1}, 4);
    auto a = build_assembly(g, 0.5, 1.2);
    CHECK(a->tau(g->interior_rank({2, 2, 2}))
          == doctest::Approx(33.70480264887251).epsilon(5e-5));
    CHECK(a->tau(g->interior_rank({1, 1, 1}))
          == doctest::Approx(50.958764282391066).epsilon(5e-5));
}

TEST_CASE("3d gagliardo energy: homogeneity and positivity") {
    auto g = build_grid(3, {0, 0, 0}, {1, 1, 1}, 6);
    auto a = build_assembly(g, 0.5, 1.2);
    auto u = make_bump(g, {0.5, 0.5, 0.5}, 0.3, 1.0);
    const double e = a->energy(u);
    CHECK(e > 0);
    DiscreteField v = u;
    v *= 2.0;
    CHECK(a->energy(v) == doctest::Approx(std::pow(2.0, 1.2) * e).epsilon(1e-12));
    // form consistency against finite differences
    std::vector<double> f;
    a->form(u, f);
    DiscreteField phi = make_bump(g, {0.4, 0.55, 0.5}, 0.25, 0.7);
    double pair = 0;
    for (std::int64_t k = 0; k < u.size(); ++k) pair += f[static_cast<std::size_t>(k)] * phi[k];
    const double h = 1e-6;
    DiscreteField up = u, um = u;
    up.axpy(h, phi);
    um.axpy(-h, phi);
    const double fd = (a->energy(up) - a->energy(um)) / (2 * h) / 1.2;
    CHECK(pair == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("residual of the zero field is zero") {
    auto g = unit_square(8);
    ProblemConfig cfg;
    cfg.grid_n = 8;
    auto a = build_assembly(g, cfg.s, cfg.q);
    Weights w = sample_weights(cfg, g);
    DiscreteField u(g);
    auto R = residual_apply(u, cfg, w, *a);
    CHECK(R.max_abs() == 0.0);
}

TEST_CASE("pairing identity: <R(u), u> equals gamma'(1)") {
    auto g = unit_square(10);
    ProblemConfig cfg;
    cfg.grid_n = 10;
    cfg.lambda = 0.3;
    auto a = build_assembly(g, cfg.s, cfg.q);
    Weights w = sample_weights(cfg, g);
    auto u = random_field(g, 17);
    auto R = residual_apply(u, cfg, w, *a);
    const double pairing = dot(R, u);
    // gamma'(1) = P + Q - lambda A - lambda B term by term
    const double P = local_p_energy(u, cfg.p);
    const double Q = a->energy(u);
    const double A = weighted_lt_integral(w.a, u, cfg.delta);
    const double B = weighted_lt_integral(w.b, u, cfg.r);
    const double dgamma = P + Q - cfg.lambda * A - cfg.c_r() * B;
    CHECK(pairing == doctest::Approx(dgamma).epsilon(1e-10));
}

TEST_CASE("lambda=0 residual splits into homogeneous parts") {
    auto g = unit_square(8);
    ProblemConfig cfg;
    cfg.grid_n = 8;
    cfg.lambda = 0.0;
    cfg.strictness = Strictness::lab;
    auto a = build_assembly(g, cfg.s, cfg.q);
    Weights w = sample_weights(cfg, g);
    auto u = make_bump(g, {0.5, 0.5, 0}, 0.35, 1.0);
    auto phi = random_field(g, 5);
    const double t = 1.7;

    DiscreteField ut = u;
    ut *= t;
    auto Rt = residual_apply(ut, cfg, w, *a);
    std::vector<double> lp, fq;
    local_p_form(u, cfg.p, lp);
    a->form(u, fq);
    double lhs = dot(Rt, phi);
    double rhs = 0;
    for (std::int64_t k = 0; k < phi.size(); ++k)
        rhs += (std::pow(t, cfg.p - 1) * lp[static_cast<std::size_t>(k)]
                + std::pow(t, cfg.q - 1) * fq[static_cast<std::size_t>(k)])
               * phi[k];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("energy and form agree under finite differences") {
    auto g = unit_square(6);
    auto a = build_assembly(g, 0.5, 1.8);
    auto u = random_field(g, 11);
    auto phi = random_field(g, 12);
    std::vector<double> f;
    a->form(u, f);
    double pair = 0;
    for (std::int64_t k = 0; k < u.size(); ++k) pair += f[static_cast<std::size_t>(k)] * phi[k];
    const double h = 1e-6;
    DiscreteField up = u, um = u;
    up.axpy(h, phi);
    um.axpy(-h, phi);
    const double fd = (a->energy(up) - a->energy(um)) / (2 * h) / 1.8;
    CHECK(pair == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("deterministic energies: repeated evaluation is bit-identical") {
    auto g = unit_square(16);
    auto a = build_assembly(g, 0.5, 1.8);
    auto u = make_bump(g, {0.4, 0.6, 0}, 0.3, 1.3);
    const double e1 = a->energy(u);
    const double e2 = a->energy(u);
    CHECK(e1 == e2);
}
