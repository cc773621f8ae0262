#include <catch2/catch_amalgamated.hpp>

#include "addinfo/dominance.hpp"
#include "addinfo/estimators.hpp"

#include <cmath>

using namespace addinfo;

namespace {
ProblemSpec unit_order() {
    ProblemSpec s;
    s.p = 1;
    s.constraint = ConstraintSet::half_line(1);
    return s;
}
} // namespace

TEST_CASE("expansion root c0") {
    CHECK(c0(1.75) == Catch::Approx(3.48066).margin(1e-4));
    // bisection oracle on G_2 frozen to 4 digits
    CHECK(c0(2.0) == Catch::Approx(4.9215).margin(1e-3));
    double prev = 1.0;
    for (double s : {1.2, 1.75, 2.0, 3.0, 5.0}) {
        double v = c0(s);
        CHECK(s * s < v);
        CHECK(v < std::exp(s));
        CHECK(v > prev);
        prev = v;
        CHECK(std::abs((1.0 - 1.0 / v) * s - std::log(v)) < 1e-12);
    }
    CHECK_THROWS_AS(c0(1.0), std::invalid_argument);
    CHECK_THROWS_AS(c0(0.5), std::invalid_argument);
}

TEST_CASE("normalized MSE bounds for the order-case mle") {
    ProblemSpec spec = unit_order();
    auto [rl, ru] = r_bounds_order(spec);
    CHECK(rl == Catch::Approx(0.75).margin(1e-15));
    CHECK(ru == Catch::Approx(1.0).margin(1e-15));
    ProblemSpec spec2 = spec;
    spec2.sigma1_sq = 2.0;
    CHECK(r_bounds_order(spec2).first == Catch::Approx(4.0 / 3.0).margin(1e-14));
    CHECK(r_bounds_order(spec).first < r_bounds_order(spec).second);
    ProblemSpec free = spec;
    free.constraint = ConstraintSet::all_reals(1);
    CHECK_THROWS_AS(r_bounds_order(free), std::invalid_argument);
}

TEST_CASE("numeric MSE bounds bracket the closed form") {
    ProblemSpec spec = unit_order();
    auto psi = [&spec](const Vec& w) { return restricted_mle_mu1(w, spec); };
    std::vector<Vec> grid;
    for (double mu : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) grid.push_back({mu});
    auto [rl, ru] = r_bounds_numeric(spec, psi, grid, 40000, 5);
    CHECK(rl <= 0.76);
    CHECK(rl >= 0.70);
    CHECK(ru >= 0.98);
    CHECK(ru <= 1.05);

    // psi = identity: constant MSE sigma1^2/sigmaY^2 on both ends
    auto id = [](const Vec& w) { return w; };
    auto [il, iu] = r_bounds_numeric(spec, id, grid, 40000, 6);
    CHECK(il == Catch::Approx(1.0).margin(0.03));
    CHECK(iu == Catch::Approx(1.0).margin(0.03));

    // floor engages when the psi MSE term vanishes
    auto zero_at = [&](const Vec& w) { return Vec{0.0}; };
    auto [fl, fu] = r_bounds_numeric(spec, zero_at, {Vec{0.0}}, 10000, 7);
    CHECK(fl == Catch::Approx(0.5).margin(1e-12));
    (void)fu;
    CHECK_THROWS_AS(r_bounds_numeric(spec, psi, {}, 100, 1), std::invalid_argument);
}

TEST_CASE("expansion report reproduces the unit-variance reference intervals") {
    ProblemSpec spec = unit_order();
    auto [rl, ru] = r_bounds_order(spec);
    ExpansionReport rep = expansion_report(rl, ru);
    CHECK(rep.c0_value == Catch::Approx(3.48066).margin(1e-3));
    CHECK(rep.dominance_interval.first == 1.0);
    CHECK(rep.dominance_interval.second == rep.c0_value);
    CHECK(rep.complete_subclass.first == Catch::Approx(1.75).margin(0.0));
    CHECK(rep.complete_subclass.second == rep.c0_value);
    CHECK(rep.minimal_complete.first == Catch::Approx(1.75).margin(0.0));
    CHECK(rep.minimal_complete.second == Catch::Approx(2.0).margin(0.0));
    double s = 1.0 + rep.r_lower;
    CHECK(s * s < rep.c0_value);
    CHECK(rep.c0_value < std::exp(s));
    // nesting
    CHECK(rep.dominance_interval.first < rep.complete_subclass.first);
    CHECK(rep.minimal_complete.second < rep.complete_subclass.second);
    CHECK_THROWS_AS(expansion_report(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("unconstrained identity estimator expansion") {
    ProblemSpec spec = unit_order();
    spec.constraint = ConstraintSet::all_reals(1);
    auto [rl, ru] = r_bounds_identity(spec);
    CHECK(rl == Catch::Approx(1.0).margin(0.0));
    ExpansionReport rep = expansion_report(rl, ru);
    CHECK(rep.dominance_interval.second == Catch::Approx(c0(2.0)).margin(1e-12));
}

TEST_CASE("dual loss parameter maps") {
    ProblemSpec spec = unit_order();
    CHECK(gamma0(0.0, 1.0, spec) == Catch::Approx(2.0).margin(0.0));
    CHECK(gamma0(0.0, 1.5, spec) == Catch::Approx(2.5).margin(0.0));
    CHECK(gamma0(0.9, 1.0, spec) > 10.0 / 2.0);  // pole as alpha -> 1
    CHECK_THROWS_AS(gamma0(1.0, 1.0, spec), std::invalid_argument);

    CHECK(sigma_z1(0.0, 1.0, spec) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK(sigma_z1(1.0, 2.0, spec) == Catch::Approx(1.0).margin(0.0));
    CHECK(sigma_z1(-1.0, 2.0, spec) == Catch::Approx(1.0).margin(0.0));
    // mre expansion: (4 sY^2 + (1-a)^2 s1^2) s1^2 / (4 sY^2 + (3+a)(1-a) s1^2)
    for (double a : {-0.5, 0.0, 0.5}) {
        double cm = mre_scale_c(spec, LossSpec(a));
        double want = (4.0 + (1.0 - a) * (1.0 - a)) / (4.0 + (3.0 + a) * (1.0 - a));
        CHECK(sigma_z1(a, cm, spec) == Catch::Approx(want).margin(1e-14));
    }
    // consistency with gamma0: sigma_z1 = gamma0 s1^2/(gamma0 + s1^2)
    for (double a : {-0.3, 0.4})
        for (double c : {1.0, 2.2}) {
            double g = gamma0(a, c, spec);
            CHECK(sigma_z1(a, c, spec) == Catch::Approx(g / (g + 1.0)).margin(1e-14));
        }
}

TEST_CASE("persistence of the dominance under misspecified variances") {
    ProblemSpec spec = unit_order();
    auto id = persistence_check(spec, MisspecScheme{1.0, 1.0, 1.0});
    CHECK(id.holds);
    CHECK(id.sigmaU_sq == id.sigmaV_sq);

    for (double k : {0.3, 1.0, 2.7})
        CHECK(persistence_check(spec, MisspecScheme{k, k, k}).holds);

    auto ex = persistence_check(spec, MisspecScheme{2.0, 1.0, 1.0});
    CHECK(ex.sigmaU_sq == Catch::Approx(1.75 / 1.5).margin(1e-14));
    CHECK(ex.sigmaV_sq == Catch::Approx(1.5).margin(0.0));
    CHECK(ex.holds);

    auto bad = persistence_check(spec, MisspecScheme{1.0, 1.0, 4.0});
    CHECK(bad.sigmaU_sq == Catch::Approx(1.5).margin(1e-14));
    CHECK(bad.sigmaV_sq == Catch::Approx(1.0).margin(0.0));
    CHECK_FALSE(bad.holds);

    Rng rng(2024);
    for (int i = 0; i < 100; ++i) {
        double k = 0.2 + 3.0 * rng.uniform();
        CHECK(persistence_check(spec, MisspecScheme{k, k, k * rng.uniform()}).holds);
        double a2 = 0.2 + 2.0 * rng.uniform(), aY = 0.2 + 2.0 * rng.uniform();
        double a1 = 0.5 * (a2 + aY) + 2.0 * rng.uniform();
        CHECK(persistence_check(spec, MisspecScheme{a1, a2, aY}).holds);
    }
}
