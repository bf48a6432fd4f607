#include <doctest.h>

#include <cmath>
#include <random>

#include "nlab/fibering.hpp"

using namespace nlab;

namespace {

struct Fixture {
    ProblemConfig cfg;
    GridPtr g;
    AssemblyPtr asm_;

    Fixture(double wa, double wb, int n = 12, double lambda = 0.2) {
        cfg.grid_n = n;
        cfg.lambda = lambda;
        cfg.weight_a = WeightSpec::constant(wa);
        cfg.weight_b = WeightSpec::constant(wb);
        g = build_grid(cfg);
        asm_ = build_assembly(g, cfg.s, cfg.q);
    }

    EnergyBreakdown bump_breakdown() const {
        Weights w = sample_weights(cfg, g);
        auto u = make_bump(g, {0.5, 0.5, 0}, 0.3, 1.0);
        return energy_breakdown(u, cfg, w, *asm_);
    }
};

// dense log-grid sign-change count of gamma' (the sampling oracle)
int sign_changes(const EnergyBreakdown& bd, const ProblemConfig& cfg, int points = 10000,
                 double t_lo = 1e-6, double t_hi = 1e6) {
    int changes = 0;
    double prev = 0;
    bool have = false;
    for (int i = 0; i < points; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, double(i) / (points - 1));
        const double d = eval_gamma(bd, t, cfg).dgamma;
        if (have && d * prev < 0) ++changes;
        if (d != 0) {
            prev = d;
            have = true;
        }
    }
    return changes;
}

} // namespace

TEST_CASE("gamma' factors through the auxiliary function") {
    Fixture f(1.0, 1.0);
    auto bd = f.bump_breakdown();
    for (double t : {0.05, 0.3, 1.0, 2.7, 19.0}) {
        const auto gd = eval_gamma(bd, t, f.cfg);
        const double lamA = f.cfg.lambda * bd.A;
        const double viaM = std::pow(t, f.cfg.delta - 1) * (gd.m - lamA);
        CHECK(gd.dgamma == doctest::Approx(viaM).epsilon(1e-10));
    }
}

TEST_CASE("gamma derivatives need positive t") {
    Fixture f(1.0, 1.0);
    auto bd = f.bump_breakdown();
    CHECK_THROWS_AS(eval_gamma(bd, 0.0, f.cfg), DomainError);
    CHECK_THROWS_AS(eval_gamma(bd, -1.0, f.cfg), DomainError);
}

TEST_CASE("case classification follows the weight signs") {
    CHECK(classify_case(Fixture(1.0, 1.0).bump_breakdown(), Fixture(1.0, 1.0).cfg)
          == FiberingCase::BothPositive);
    CHECK(classify_case(Fixture(-1.0, 1.0).bump_breakdown(), Fixture(-1.0, 1.0).cfg)
          == FiberingCase::ANegBPos);
    CHECK(classify_case(Fixture(1.0, -1.0).bump_breakdown(), Fixture(1.0, -1.0).cfg)
          == FiberingCase::APosBNeg);
    CHECK(classify_case(Fixture(-1.0, -1.0).bump_breakdown(), Fixture(-1.0, -1.0).cfg)
          == FiberingCase::BothNegative);
}

TEST_CASE("both-positive case yields the full root structure") {
    Fixture f(1.0, 1.0);
    auto bd = f.bump_breakdown();
    auto rep = fibering_roots(bd, f.cfg);
    REQUIRE(rep.case_label == FiberingCase::BothPositive);
    REQUIRE(!rep.no_roots);
    REQUIRE(rep.t1);
    REQUIRE(rep.t2);
    REQUIRE(rep.t_max);
    CHECK(*rep.t1 < *rep.t_max);
    CHECK(*rep.t_max < *rep.t2);
    CHECK(*rep.ddgamma_t1 > 0);
    CHECK(*rep.ddgamma_t2 < 0);
    // roots satisfy the scale-free residual tolerance
    const double scale = bd.P + bd.Q + f.cfg.lambda * std::abs(bd.A) + std::abs(bd.B);
    CHECK(std::abs(eval_gamma(bd, *rep.t1, f.cfg).dgamma) <= 1e-10 * scale);
    CHECK(std::abs(eval_gamma(bd, *rep.t2, f.cfg).dgamma) <= 1e-10 * scale);
    // dense-sampling oracle sees exactly two sign changes around the roots
    CHECK(sign_changes(bd, f.cfg, 10000, *rep.t1 / 1e3, *rep.t2 * 1e3) == 2);
}

TEST_CASE("negative-a case has a single maximum root") {
    Fixture f(-1.0, 1.0);
    auto bd = f.bump_breakdown();
    auto rep = fibering_roots(bd, f.cfg);
    REQUIRE(rep.case_label == FiberingCase::ANegBPos);
    REQUIRE(rep.t1);
    CHECK(*rep.ddgamma_t1 < 0);
    CHECK(sign_changes(bd, f.cfg, 10000, *rep.t1 / 1e3, *rep.t1 * 1e3) == 1);
}

TEST_CASE("negative-b case has a single minimum root") {
    Fixture f(1.0, -1.0);
    auto bd = f.bump_breakdown();
    auto rep = fibering_roots(bd, f.cfg);
    REQUIRE(rep.case_label == FiberingCase::APosBNeg);
    REQUIRE(rep.t1);
    CHECK(*rep.ddgamma_t1 > 0);
    CHECK(sign_changes(bd, f.cfg, 10000, *rep.t1 / 1e3, *rep.t1 * 1e3) == 1);
}

TEST_CASE("both-negative case has no critical point") {
    Fixture f(-1.0, -1.0);
    auto bd = f.bump_breakdown();
    auto rep = fibering_roots(bd, f.cfg);
    CHECK(rep.case_label == FiberingCase::BothNegative);
    CHECK(!rep.t1);
    CHECK(!rep.t2);
    CHECK(sign_changes(bd, f.cfg) == 0);
    // gamma is strictly increasing along the ray
    double prev = -1;
    for (double t : {0.1, 0.5, 1.0, 5.0, 50.0}) {
        const double gval = eval_gamma(bd, t, f.cfg).gamma;
        CHECK(gval > prev);
        CHECK(eval_gamma(bd, t, f.cfg).dgamma > 0);
        prev = gval;
    }
}

TEST_CASE("large lambda loses the root pair") {
    Fixture f(1.0, 1.0, 12, 1e6);
    auto bd = f.bump_breakdown();
    auto rep = fibering_roots(bd, f.cfg);
    CHECK(rep.case_label == FiberingCase::BothPositive);
    CHECK(rep.no_roots);
    CHECK(sign_changes(bd, f.cfg) == 0);
}

TEST_CASE("scaling the field scales the roots inversely") {
    Fixture f(1.0, 1.0);
    Weights w = sample_weights(f.cfg, f.g);
    auto u = make_bump(f.g, {0.5, 0.5, 0}, 0.3, 1.0);
    auto bd1 = energy_breakdown(u, f.cfg, w, *f.asm_);
    DiscreteField u2 = u;
    u2 *= 2.0;
    auto bd2 = energy_breakdown(u2, f.cfg, w, *f.asm_);
    auto r1 = fibering_roots(bd1, f.cfg);
    auto r2 = fibering_roots(bd2, f.cfg);
    CHECK(*r2.t1 == doctest::Approx(*r1.t1 / 2).epsilon(1e-8));
    CHECK(*r2.t2 == doctest::Approx(*r1.t2 / 2).epsilon(1e-8));
}

TEST_CASE("projection is idempotent") {
    Fixture f(1.0, 1.0);
    Weights w = sample_weights(f.cfg, f.g);
    auto u = make_bump(f.g, {0.5, 0.5, 0}, 0.3, 1.0);
    auto bd = energy_breakdown(u, f.cfg, w, *f.asm_);
    auto rep = fibering_roots(bd, f.cfg);
    DiscreteField v = u;
    v *= *rep.t1;
    auto bdv = energy_breakdown(v, f.cfg, w, *f.asm_);
    auto rep2 = fibering_roots(bdv, f.cfg);
    CHECK(*rep2.t1 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("auxiliary function is monotone around its maximum") {
    Fixture f(1.0, 1.0);
    auto bd = f.bump_breakdown();
    auto rep = fibering_roots(bd, f.cfg);
    REQUIRE(rep.t_max);
    const double tm = *rep.t_max;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const double t = tm * (0.001 + 0.999 * i / 999.0);
        const double m = eval_gamma(bd, t, f.cfg).m;
        CHECK(m >= prev - 1e-12 * std::abs(m));
        prev = m;
    }
    prev = eval_gamma(bd, tm, f.cfg).m;
    for (int i = 1; i <= 1000; ++i) {
        const double t = tm * (1 + 9.0 * i / 1000.0);
        const double m = eval_gamma(bd, t, f.cfg).m;
        CHECK(m <= prev + 1e-12 * std::abs(prev));
        prev = m;
    }
}

TEST_CASE("gamma table sampling is log-spaced with the requested count") {
    Fixture f(1.0, 1.0);
    auto bd = f.bump_breakdown();
    auto rep = fibering_roots(bd, f.cfg);
    sample_gamma(rep, bd, f.cfg, 1e-2, 1e2, 41);
    REQUIRE(rep.samples.size() == 41);
    CHECK(rep.samples.front()[0] == doctest::Approx(1e-2));
    CHECK(rep.samples.back()[0] == doctest::Approx(1e2));
}
