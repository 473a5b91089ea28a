#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "anmimo/common.hpp"
#include "anmimo/special_functions.hpp"
#include "test_helpers.hpp"

using anmimo::DomainError;
using anmimo::upper_incomplete_gamma;
using anmimo::wishart_capacity_nats;

TEST_CASE("upper incomplete gamma closed forms", "[special_functions]") {
    CHECK(upper_incomplete_gamma(1, 1.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(upper_incomplete_gamma(1, 0.25) == Catch::Approx(std::exp(-0.25)).epsilon(1e-14));
    CHECK(upper_incomplete_gamma(1, 4.0) == Catch::Approx(std::exp(-4.0)).epsilon(1e-14));

    // Gamma(0, 1) = E_1(1)
    CHECK(upper_incomplete_gamma(0, 1.0) ==
          Catch::Approx(0.21938393439552027).epsilon(1e-12));
    // one step of the downward recurrence from E_1(1)
    CHECK(upper_incomplete_gamma(-1, 1.0) ==
          Catch::Approx(0.14849550677592205).epsilon(1e-12));
    CHECK(upper_incomplete_gamma(-2, 1.0) ==
          Catch::Approx(0.10969196719776014).epsilon(1e-12));

    // positive integer orders: Gamma(a, b) = (a-1)! e^{-b} sum b^k/k!
    CHECK(upper_incomplete_gamma(3, 2.0) ==
          Catch::Approx(2.0 * std::exp(-2.0) * (1.0 + 2.0 + 2.0)).epsilon(1e-14));
}

TEST_CASE("upper incomplete gamma against quadrature", "[special_functions]") {
    for (int a : {-40, -25, -10, -3, -1, 0, 1, 2, 5}) {
        for (double b : {0.25, 1.0, 4.0}) {
            const double got = upper_incomplete_gamma(a, b);
            const double want = testutil::upper_gamma_quadrature(a, b);
            INFO("a=" << a << " b=" << b << " got=" << got << " want=" << want);
            CHECK(std::fabs(got - want) <= 1e-10 * std::fabs(want));
        }
    }
}

TEST_CASE("upper incomplete gamma domain", "[special_functions]") {
    CHECK_THROWS_AS(upper_incomplete_gamma(0, 0.0), DomainError);
    CHECK_THROWS_AS(upper_incomplete_gamma(2, -1.0), DomainError);
}

TEST_CASE("wishart capacity in nats", "[special_functions]") {
    constexpr double kLn2 = 0.69314718055994530942;
    // SISO value e * E_1(1) in nats
    CHECK(wishart_capacity_nats(1, 1, 1.0) ==
          Catch::Approx(0.86034738227088595 * kLn2).epsilon(1e-12));
    CHECK(wishart_capacity_nats(2, 4, 0.0) == 0.0);
    CHECK_THROWS_AS(wishart_capacity_nats(3, 2, 1.0), DomainError);
    CHECK_THROWS_AS(wishart_capacity_nats(0, 1, 1.0), DomainError);
    CHECK_THROWS_AS(wishart_capacity_nats(1, 1, -0.5), DomainError);
}
