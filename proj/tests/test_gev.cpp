#include <doctest.h>

#include <cmath>

#include "nlab/constants.hpp"
#include "nlab/gev.hpp"

using namespace nlab;

namespace {

struct GevFixture {
    ProblemConfig cfg;   // p < q section order
    GridPtr g;
    AssemblyPtr asm_;
    DiscreteField phi;

    explicit GevFixture(int n = 14) {
        cfg.grid_n = n;
        g = build_grid(cfg);
        asm_ = build_assembly(g, cfg.s, cfg.q);
        phi = make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0);
    }
};

} // namespace

TEST_CASE("upper bound is constant in nonnegative shifts and exact in negative ones") {
    GevFixture f;
    const double u0 = lambda_star_upper_bound(0.0, f.phi, 1.0, f.cfg, *f.asm_);
    CHECK(u0 > 0);
    CHECK(std::isfinite(u0));
    for (double sft : {0.5, 1.0, 7.0})
        CHECK(lambda_star_upper_bound(sft, f.phi, 1.0, f.cfg, *f.asm_) == u0);
    CHECK(lambda_star_upper_bound(-1.0, f.phi, 1.0, f.cfg, *f.asm_) == doctest::Approx(u0 + 1.0));
}

TEST_CASE("upper bound rejects bad inputs") {
    GevFixture f;
    CHECK_THROWS_AS(lambda_star_upper_bound(0, f.phi, 0.0, f.cfg, *f.asm_), DomainError);
    DiscreteField zero(f.g);
    CHECK_THROWS_AS(lambda_star_upper_bound(0, zero, 1.0, f.cfg, *f.asm_), DomainError);
    DiscreteField neg = f.phi;
    neg *= -1.0;
    CHECK_THROWS_AS(lambda_star_upper_bound(0, neg, 1.0, f.cfg, *f.asm_), DomainError);
    ProblemConfig flipped = f.cfg;
    flipped.p = 1.9;
    flipped.q = 1.3;
    CHECK_THROWS_AS(lambda_star_upper_bound(0, f.phi, 1.0, flipped, *f.asm_), DomainError);
}

TEST_CASE("doubling rho never increases the bound") {
    GevFixture f;
    const double u1 = lambda_star_upper_bound(0.0, f.phi, 1.0, f.cfg, *f.asm_);
    const double u2 = lambda_star_upper_bound(0.0, f.phi, 2.0, f.cfg, *f.asm_);
    CHECK(u2 <= u1);
}

TEST_CASE("formula-generated curves pass both monotonicity checks") {
    GevFixture f;
    auto curve = gev_curve({-2, -1, -0.5, 0, 0.5, 1, 2, 3}, f.phi, 1.0, f.cfg, *f.asm_);
    auto v = curve_monotonicity(curve);
    CHECK(v.nonincreasing);
    CHECK(v.shifted_nondecreasing);
}

TEST_CASE("hand-built increasing curve fails nonincreasing") {
    GevCurve c;
    c.shifts = {0, 1, 2};
    c.upper_bounds = {1.0, 2.0, 3.0};
    auto v = curve_monotonicity(c);
    CHECK(!v.nonincreasing);
    CHECK(v.shifted_nondecreasing);

    GevCurve single;
    single.shifts = {0};
    single.upper_bounds = {1};
    CHECK_THROWS_AS(curve_monotonicity(single), SpecError);
}

TEST_CASE("existence probe triggers on alpha above the eigenvalue") {
    GevFixture f;
    auto lp = rayleigh_minimize(RayleighTarget::lambda_1p, f.g, f.cfg, 1, 5000, 1);
    auto lq = rayleigh_minimize(RayleighTarget::lambda_1q, f.g, f.cfg, 1, 5000, 1);
    EigenEstimates eig{lp.value, lq.value, abs_field(lp.minimizer)};

    auto hit = existence_probe(2 * lp.value, 0.0, f.cfg, eig, *f.asm_);
    CHECK(hit.descent_found);
    auto hit_big_beta = existence_probe(2 * lp.value, 10 * lq.value, f.cfg, eig, *f.asm_);
    CHECK(hit_big_beta.descent_found);

    auto miss = existence_probe(0.5 * lp.value, 0.5 * lq.value, f.cfg, eig, *f.asm_);
    CHECK(!miss.descent_found);

    // monotone in alpha: descent at alpha implies descent at larger alpha
    auto weak = existence_probe(1.02 * lp.value, 0.0, f.cfg, eig, *f.asm_);
    CHECK(weak.descent_found);
    auto strong = existence_probe(1.5 * lp.value, 0.0, f.cfg, eig, *f.asm_);
    CHECK(strong.descent_found);
}

TEST_CASE("mu sweep transitions within one grid step of lambda_1p / c1") {
    GevFixture f;
    auto lp = rayleigh_minimize(RayleighTarget::lambda_1p, f.g, f.cfg, 1, 5000, 1);
    auto lq = rayleigh_minimize(RayleighTarget::lambda_1q, f.g, f.cfg, 1, 5000, 1);
    EigenEstimates eig{lp.value, lq.value, abs_field(lp.minimizer)};
    const double c1 = 0.7, c2 = 0.2;
    const double trigger = lp.value / c1;
    const double step = trigger / 100;
    double first_hit = -1;
    for (int k = 1; k <= 200; ++k) {
        const double mu = k * step;
        auto pr = existence_probe(mu * c1, mu * c2, f.cfg, eig, *f.asm_);
        if (pr.descent_found) {
            first_hit = mu;
            break;
        }
    }
    REQUIRE(first_hit > 0);
    CHECK(std::abs(first_hit - trigger) <= step * (1 + 1e-9));
}
