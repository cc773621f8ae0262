#include <catch2/catch_amalgamated.hpp>

#include "addinfo/model.hpp"
#include "addinfo/rng.hpp"

#include <cmath>

using namespace addinfo;

namespace {
ProblemSpec order_spec(int p = 1) {
    ProblemSpec s;
    s.p = p;
    s.constraint = ConstraintSet::half_line(p);
    return s;
}
} // namespace

TEST_CASE("rotation examples") {
    ProblemSpec spec = order_spec();
    RotatedFrame f = rotate({2.0}, {0.0}, spec);
    CHECK(f.w1[0] == Catch::Approx(1.0).margin(0.0));
    CHECK(f.w2[0] == Catch::Approx(1.0).margin(0.0));
    RotatedFrame same = rotate({0.7}, {0.7}, spec);
    CHECK(same.w1[0] == 0.0);
    CHECK(same.w2[0] == 0.7);
    CHECK(f.var_w1 == Catch::Approx(0.5));
    CHECK(f.var_w2 == Catch::Approx(0.5));
    CHECK_THROWS_AS(rotate({1.0, 2.0}, {0.0}, spec), std::invalid_argument);
}

TEST_CASE("rotation round trips exactly") {
    ProblemSpec spec;
    spec.p = 2;
    spec.sigma1_sq = 1.7;
    spec.sigma2_sq = 0.4;
    spec.constraint = ConstraintSet::half_line(2);
    Rng rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        Vec x1 = {3.0 * rng.normal(), 3.0 * rng.normal()};
        Vec x2 = {3.0 * rng.normal(), 3.0 * rng.normal()};
        auto [y1, y2] = reconstruct(rotate(x1, x2, spec));
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(y1[i] - x1[i]) <= 1e-15 * std::max({1.0, std::abs(x1[i]), std::abs(x2[i])}));
            CHECK(std::abs(y2[i] - x2[i]) <= 1e-14 * std::max({1.0, std::abs(x1[i]), std::abs(x2[i])}));
        }
    }
}

TEST_CASE("linear reduction") {
    ProblemSpec spec = order_spec();
    auto id = reduce_linear(1.0, 1.0, {0.0}, spec);
    CHECK(id.spec.sigma1_sq == spec.sigma1_sq);
    CHECK(id.spec.sigma2_sq == spec.sigma2_sq);

    auto red = reduce_linear(2.0, -1.0, {0.5}, spec);
    CHECK(red.spec.sigma1_sq == Catch::Approx(4.0));
    CHECK(red.spec.sigma2_sq == Catch::Approx(1.0));
    CHECK(red.spec.sigmaY_sq == Catch::Approx(4.0));
    Vec x1 = {1.0}, x2 = {2.0}, y = {3.0};
    red.transform(x1, x2, y);
    CHECK(x1[0] == Catch::Approx(2.0));
    CHECK(x2[0] == Catch::Approx(-2.5));
    CHECK(y[0] == Catch::Approx(6.0));
    CHECK_THROWS_AS(reduce_linear(0.0, 1.0, {0.0}, spec), std::invalid_argument);
}

TEST_CASE("bivariate decorrelation constants") {
    ProblemSpec spec = order_spec();
    auto near_zero = reduce_bivariate_correlated(1e-12, spec);
    CHECK(near_zero.c1 == Catch::Approx(1.0).margin(1e-10));
    CHECK(near_zero.c2 == Catch::Approx(1.0).margin(1e-10));
    auto r = reduce_bivariate_correlated(1.0 / std::sqrt(3.0), spec);
    CHECK(r.c1 == Catch::Approx(1.5774).margin(1e-4));
    CHECK(r.c2 == Catch::Approx(1.1547).margin(1e-4));
    CHECK(r.d == 0.0);
    CHECK_THROWS_AS(reduce_bivariate_correlated(1.0, spec), std::invalid_argument);
    CHECK_THROWS_AS(reduce_bivariate_correlated(0.0, spec), std::invalid_argument);
}

TEST_CASE("constraint probabilities") {
    CHECK(constraint_probability(ConstraintSet::all_reals(3), {1.0, 2.0, 3.0}, 2.0) == 1.0);
    CHECK(constraint_probability(ConstraintSet::half_line(1), {0.0}, 1.0) ==
          Catch::Approx(0.5).margin(1e-15));
    CHECK(constraint_probability(ConstraintSet::ball(2, 1.0), {0.0, 0.0}, 1.0) ==
          Catch::Approx(1.0 - std::exp(-0.5)).margin(1e-12));
    // product rule for a rectangle
    double p = constraint_probability(ConstraintSet::rectangle({1.0, 2.0}), {0.2, -0.3}, 1.5);
    double sd = std::sqrt(1.5);
    double want = (std_normal_cdf((1.0 - 0.2) / sd) - std_normal_cdf((-1.0 - 0.2) / sd)) *
                  (std_normal_cdf((2.0 + 0.3) / sd) - std_normal_cdf((-2.0 + 0.3) / sd));
    CHECK(p == Catch::Approx(want).margin(1e-14));
    // monotone in m
    double prev = 0.0;
    for (double m : {0.3, 0.8, 1.5, 3.0}) {
        double cur = constraint_probability(ConstraintSet::ball(2, m), {0.5, 0.0}, 1.0);
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK_THROWS_AS(constraint_probability(ConstraintSet::half_line(1), {0.0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("constraint probability vs monte carlo") {
    Rng rng(99);
    ConstraintSet A = ConstraintSet::ball(3, 2.0);
    Vec mu = {0.5, -0.5, 1.0};
    double var = 1.3, sd = std::sqrt(var);
    double want = constraint_probability(A, mu, var);
    const int N = 200000;
    int hits = 0;
    Vec t(3);
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < 3; ++k) t[k] = mu[k] + sd * rng.normal();
        if (A.contains(t)) ++hits;
    }
    double hat = static_cast<double>(hits) / N;
    CHECK(std::abs(hat - want) <= 4.0 * std::sqrt(want * (1.0 - want) / N));
}

TEST_CASE("projection onto the constraint sets") {
    CHECK(project_onto(ConstraintSet::half_line(1), {-3.0})[0] == 0.0);
    CHECK(project_onto(ConstraintSet::half_line(1), {2.0})[0] == 2.0);
    Vec b = project_onto(ConstraintSet::ball(2, 1.0), {3.0, 4.0});
    CHECK(b[0] == Catch::Approx(0.6).margin(1e-15));
    CHECK(b[1] == Catch::Approx(0.8).margin(1e-15));
    CHECK(project_onto(ConstraintSet::interval(1.0), {1.7})[0] == 1.0);

    Rng rng(11);
    ConstraintSet A = ConstraintSet::rectangle({1.0, 0.5});
    for (int rep = 0; rep < 100; ++rep) {
        Vec u = {4.0 * rng.normal(), 4.0 * rng.normal()};
        Vec v = {4.0 * rng.normal(), 4.0 * rng.normal()};
        Vec pu = project_onto(A, u), pv = project_onto(A, v);
        Vec pp = project_onto(A, pu);
        CHECK(pp == pu);
        double dp = std::hypot(pu[0] - pv[0], pu[1] - pv[1]);
        double d = std::hypot(u[0] - v[0], u[1] - v[1]);
        CHECK(dp <= d + 1e-12);
    }
}

TEST_CASE("problem spec validation") {
    ProblemSpec bad = order_spec();
    bad.sigma2_sq = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    ProblemSpec mismatch = order_spec(2);
    mismatch.constraint = ConstraintSet::half_line(3);
    CHECK_THROWS_AS(mismatch.validate(), std::invalid_argument);
    ProblemSpec ival;
    ival.p = 2;
    ival.constraint = ConstraintSet::interval(1.0);
    ival.constraint.p = 2;
    CHECK_THROWS_AS(ival.validate(), std::invalid_argument);
    CHECK(order_spec().constraint.contains({0.0}));
    CHECK_FALSE(ConstraintSet::interval(1.0).contains({1.5}));
    CHECK(ConstraintSet::all_reals(2).unconstrained());
}
