#include <catch2/catch_amalgamated.hpp>

#include "addinfo/quadrature.hpp"
#include "addinfo/skew_normal.hpp"

#include <cmath>

using namespace addinfo;

namespace {

// quadrature oracle for the k-th raw moment of the unnormalized density
// (fixed high-order rule, independent of the escalation logic under test)
double sn_moment_oracle(int n, double a0, double a1, int k) {
    return hermite_rule(512).integrate([&](double z) {
        double p = std_normal_cdf(a0 + a1 * z);
        return std::pow(z, k) * std::pow(p, n);
    });
}

} // namespace

TEST_CASE("skew normal density values") {
    CHECK(SkewNormalGB(1, 0.0, 0.0, 0.0, 1.0).pdf(0.0) ==
          Catch::Approx(0.3989423).margin(1e-7));
    // K_1(0,1) = 1/2, so SN(1,0,1) is 2 phi(t) Phi(t)
    SkewNormalGB d(1, 0.0, 1.0, 0.0, 1.0);
    CHECK(d.pdf(0.0) == Catch::Approx(0.3989423).margin(1e-7));
    CHECK(d.pdf(1.3) == Catch::Approx(2.0 * std_normal_pdf(1.3) * std_normal_cdf(1.3)).margin(1e-13));
    CHECK(d.normalizer() == Catch::Approx(0.5).margin(1e-11));
}

TEST_CASE("skew normal densities integrate to one") {
    for (int n : {1, 2, 3, 4})
        for (double a0 : {-1.0, 0.7})
            for (double a1 : {-1.2, 0.0, 0.5}) {
                SkewNormalGB d(n, a0, a1, 2.0, 0.5);
                double mass = integrate_adaptive([&](double t) { return d.pdf(t); }, 2.0 - 8.0,
                                                 2.0 + 8.0, 1e-11);
                CHECK(mass == Catch::Approx(1.0).margin(1e-8));
            }
}

TEST_CASE("skew normal mean formula against the quadrature oracle") {
    CHECK(SkewNormalGB(2, 1.0, 0.0, 0.4, 2.0).mean() == Catch::Approx(0.4).margin(1e-13));
    CHECK(SkewNormalGB(1, 0.0, 1.0, 0.0, 1.0).mean() ==
          Catch::Approx(1.0 / std::sqrt(M_PI)).margin(1e-12));
    for (int n : {1, 2, 3, 4})
        for (double a0 : {-0.8, 0.0, 1.0})
            for (double a1 : {-2.0, 0.5, 1.0}) {
                SkewNormalGB d(n, a0, a1, 0.7, 1.4);
                double ew = sn_moment_oracle(n, a0, a1, 1) / sn_moment_oracle(n, a0, a1, 0);
                CHECK(d.mean() == Catch::Approx(0.7 + 1.4 * ew).margin(1e-9));
            }
}

TEST_CASE("alpha1 = 0 collapses to the plain normal") {
    SkewNormalGB d(3, 0.9, 0.0, -1.0, 2.0);
    for (double t = -6.0; t <= 4.0; t += 1.0)
        CHECK(d.pdf(t) == Catch::Approx(std_normal_pdf((t + 1.0) / 2.0) / 2.0).margin(1e-14));
}

TEST_CASE("interval variant") {
    SkewNormalInterval d(2, 1.0, 0.5, -1.0, 0.0, 1.0);
    double mass = integrate_adaptive([&](double t) { return d.pdf(t); }, -9.0, 9.0, 1e-11);
    CHECK(mass == Catch::Approx(1.0).margin(1e-8));
    CHECK(d.normalizer() == Catch::Approx(j_n(2, 1.0, 0.5, -1.0)).margin(1e-13));

    // n = 1 normalizer equals the scalar-CDF closed form
    SkewNormalInterval d1(1, 0.8, 1.1, -0.3, 0.0, 1.0);
    double s = std::sqrt(1.0 + 1.1 * 1.1);
    CHECK(d1.normalizer() ==
          Catch::Approx(std_normal_cdf(0.8 / s) - std_normal_cdf(-0.3 / s)).margin(1e-10));

    // symmetric alpha0 = -alpha2 has mean xi
    SkewNormalInterval sym(1, 1.2, 0.7, -1.2, 3.0, 2.0);
    CHECK(sym.mean() == Catch::Approx(3.0).margin(1e-13));

    // mean for n = 1 against the quadrature oracle
    double num = hermite_rule(512).integrate(
        [&](double z) { return z * std_normal_cdf_diff(0.8 + 1.1 * z, -0.3 + 1.1 * z); });
    CHECK(d1.mean() == Catch::Approx(num / d1.normalizer()).margin(1e-10));

    CHECK_THROWS_AS(d.mean(), std::invalid_argument);  // no closed form for n >= 2
    CHECK_THROWS_AS(SkewNormalInterval(1, -1.0, 0.5, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("interval variant converges to the half-line family") {
    SkewNormalGB g(2, 0.8, 0.6, 0.0, 1.0);
    SkewNormalInterval gi(2, 0.8, 0.6, -30.0, 0.0, 1.0);
    for (double t = -5.0; t <= 5.0; t += 0.5)
        CHECK(gi.pdf(t) == Catch::Approx(g.pdf(t)).margin(1e-10));
}

TEST_CASE("sampler determinism and empirical mean") {
    SkewNormalGB d(1, 0.0, 1.0, 0.0, 1.0);
    auto a = d.sample(2000, 123);
    auto b = d.sample(2000, 123);
    auto c = d.sample(2000, 124);
    CHECK(a == b);
    CHECK(a != c);

    auto draws = d.sample(200000, 5);
    double sum = 0.0, sumsq = 0.0;
    for (double t : draws) {
        sum += t;
        sumsq += t * t;
    }
    double mean = sum / draws.size();
    double se = std::sqrt((sumsq / draws.size() - mean * mean) / draws.size());
    CHECK(std::abs(mean - d.mean()) <= 4.0 * se);

    SkewNormalInterval di(1, 1.0, 0.8, -1.0, 0.5, 1.2);
    auto id1 = di.sample(1000, 9);
    auto id2 = di.sample(1000, 9);
    CHECK(id1 == id2);
    CHECK_THROWS_AS(d.sample(0, 1), std::invalid_argument);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(SkewNormalGB(0, 0.0, 1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SkewNormalGB(1, 0.0, 1.0, 0.0, 0.0), std::invalid_argument);
}
