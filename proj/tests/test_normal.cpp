#include <catch2/catch_amalgamated.hpp>

#include "addinfo/normal.hpp"
#include "addinfo/quadrature.hpp"

#include <cmath>
#include <limits>

using namespace addinfo;

TEST_CASE("standard normal pdf and cdf reference values") {
    CHECK(std_normal_cdf(0.0) == Catch::Approx(0.5).margin(1e-16));
    CHECK(std_normal_pdf(0.0) == Catch::Approx(0.3989422804).margin(1e-10));
    // erf-based oracle
    double oracle = 0.5 * (1.0 + std::erf(1.0 / std::sqrt(2.0)));
    CHECK(std_normal_cdf(1.0) == Catch::Approx(oracle).margin(1e-14));
    CHECK(std_normal_cdf(1.0) == Catch::Approx(0.8413447461).margin(1e-10));
    CHECK(std_normal_cdf_c(1.3) == Catch::Approx(1.0 - std_normal_cdf(1.3)).margin(1e-15));
}

TEST_CASE("log cdf stays accurate through the deep tail") {
    for (double z = -8.0; z >= -36.0; z -= 3.5) {
        // quadrature oracle for Phi(z): integrate phi over [z - 20, z] and add
        // the analytically negligible remainder bound
        double tail = integrate_adaptive([](double t) { return std_normal_pdf(t); }, z - 20.0, z,
                                         std::abs(std_normal_pdf(z)) * 1e-14);
        CHECK(log_std_normal_cdf(z) == Catch::Approx(std::log(tail)).epsilon(1e-12));
    }
    // finite far beyond the erfc range
    CHECK(std::isfinite(log_std_normal_cdf(-200.0)));
    CHECK(log_std_normal_cdf(-200.0) ==
          Catch::Approx(-0.5 * 200.0 * 200.0 - log_sqrt_2pi + std::log(1.0 / 200.0)).epsilon(1e-3));
}

TEST_CASE("inverse mills ratio") {
    CHECK(inverse_mills(0.0) == Catch::Approx(0.7978845608).margin(1e-10));  // sqrt(2/pi)
    // asymptotic oracle R(z) ~ -z + 1/(-z) - 2/(-z)^3 for z -> -inf
    double oracle40 = 40.0 + 1.0 / 40.0 - 2.0 / (40.0 * 40.0 * 40.0);
    CHECK(inverse_mills(-40.0) == Catch::Approx(oracle40).epsilon(1e-6));
    CHECK(inverse_mills(-40.0) == Catch::Approx(40.0249).margin(1e-3));
    // upper-tail oracle by quadrature: Phi(8) = 1 - Integral_8^40 phi
    double q = integrate_adaptive([](double t) { return std_normal_pdf(t); }, 8.0, 40.0, 1e-30);
    CHECK(inverse_mills(8.0) == Catch::Approx(std_normal_pdf(8.0) / (1.0 - q)).epsilon(1e-12));

    double prev = std::numeric_limits<double>::infinity();
    for (double z = -45.0; z <= 10.0; z += 1.3) {
        double cur = inverse_mills(z);
        REQUIRE(cur > 0.0);
        REQUIRE(cur < prev);
        prev = cur;
    }
}

TEST_CASE("cdf differences avoid cancellation in either tail") {
    CHECK(std_normal_cdf_diff(1.0, -1.0) ==
          Catch::Approx(2.0 * std_normal_cdf(1.0) - 1.0).margin(1e-16));
    // both arguments deep in the upper tail
    double d = std_normal_cdf_diff(10.5, 10.0);
    double oracle = integrate_adaptive([](double t) { return std_normal_pdf(t); }, 10.0, 10.5, 1e-30);
    CHECK(d == Catch::Approx(oracle).epsilon(1e-10));
    CHECK(log_std_normal_cdf_diff(10.5, 10.0) == Catch::Approx(std::log(oracle)).epsilon(1e-10));
    // both deep in the lower tail
    double ld = log_std_normal_cdf_diff(-20.0, -21.0);
    double lo = integrate_adaptive([](double t) { return std_normal_pdf(t); }, -21.0, -20.0, 1e-110);
    CHECK(ld == Catch::Approx(std::log(lo)).epsilon(1e-10));
}

TEST_CASE("non-finite inputs are rejected") {
    CHECK_THROWS_AS(std_normal_pdf(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(inverse_mills(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_THROWS_AS(log_std_normal_cdf_diff(1.0, 1.0), std::invalid_argument);
}
