#include <catch2/catch_amalgamated.hpp>

#include "addinfo/quadrature.hpp"

#include <cmath>

using namespace addinfo;

TEST_CASE("probabilist hermite rules integrate the normal measure") {
    for (std::size_t order : {8u, 64u, 128u, 256u}) {
        QuadratureRule r = gauss_hermite_probabilist(order);
        REQUIRE(r.size() == order);
        double wsum = 0.0;
        for (std::size_t i = 0; i < order; ++i) {
            wsum += r.weights[i];
            REQUIRE(r.weights[i] > 0.0);
            if (i > 0) REQUIRE(r.nodes[i] > r.nodes[i - 1]);
        }
        CHECK(wsum == Catch::Approx(1.0).margin(1e-12));
        CHECK(r.integrate([](double z) { return z; }) == Catch::Approx(0.0).margin(1e-13));
        CHECK(r.integrate([](double z) { return z * z; }) == Catch::Approx(1.0).margin(1e-11));
        CHECK(r.integrate([](double z) { return z * z * z * z; }) ==
              Catch::Approx(3.0).margin(1e-10));
        // odd rule: exact for polynomials up to degree 2*order - 1
        if (order == 8) {
            double m6 = r.integrate([](double z) { return std::pow(z, 6); });
            CHECK(m6 == Catch::Approx(15.0).margin(1e-10));
        }
    }
}

TEST_CASE("hermite expectation escalates order until agreement") {
    // E cos(Z) = exp(-1/2)
    double v = gauss_hermite_expect([](double z) { return std::cos(z); });
    CHECK(v == Catch::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("gauss-legendre and the adaptive panel integrator") {
    QuadratureRule r = gauss_legendre(12, 0.0, 1.0);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    CHECK(wsum == Catch::Approx(1.0).margin(1e-14));
    CHECK(r.integrate([](double x) { return x * x * x; }) == Catch::Approx(0.25).margin(1e-14));

    double gauss_mass = integrate_adaptive(
        [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }, -10.0, 10.0, 1e-13);
    CHECK(gauss_mass == Catch::Approx(1.0).margin(1e-12));

    // a kinked integrand still resolves by panel bisection
    double v = integrate_adaptive([](double x) { return std::abs(x); }, -1.0, 2.0, 1e-12);
    CHECK(v == Catch::Approx(2.5).margin(1e-10));
}

TEST_CASE("rule constructors reject empty orders") {
    CHECK_THROWS_AS(gauss_hermite_probabilist(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
}
