#include <cmath>
#include <doctest.h>

#include "vol32/errors.hpp"
#include "vol32/quadrature.hpp"

using namespace vol32;

TEST_SUITE("quadrature") {

TEST_CASE("polynomial and trigonometric basics") {
    auto r1 = integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(std::abs(r1.value - 1.0 / 3.0) < 1e-14);
    CHECK(r1.evaluations >= 15);

    auto r2 = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(std::abs(r2.value - 2.0) < 1e-12);

    // oscillatory with massive cancellation
    auto r3 = integrate([](double x) { return std::cos(x); }, 0.0, 10 * M_PI);
    CHECK(std::abs(r3.value) < 1e-10);
}

TEST_CASE("error estimate bounds the true error on a hard integrand") {
    // integrable kink
    auto r = integrate([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0,
                       1.0);
    const double exact = (1.0 / 9.0 + 4.0 / 9.0) / 2.0;  // 5/18
    CHECK(std::abs(r.value - exact) < 1e-10);
    CHECK(std::abs(r.value - exact) <= std::max(r.error, 1e-14));
}

TEST_CASE("segmented integration splits at known kinks") {
    auto f = [](double x) { return std::abs(std::sin(3.0 * x)); };
    // kinks at multiples of pi/3
    std::vector<double> pts{0.0, M_PI / 3.0, 2.0 * M_PI / 3.0, M_PI,
                            1.2 * M_PI};
    auto r = integrate_segmented(f, pts);
    // exact: each arch has area 2/3; 3 full arches plus a partial one
    const double partial = (1.0 - std::cos(3.0 * (1.2 * M_PI - M_PI))) / 3.0;
    CHECK(std::abs(r.value - (3.0 * 2.0 / 3.0 + partial)) < 1e-12);
}

TEST_CASE("semi-infinite transforms") {
    auto r1 = integrate_semi_infinite([](double x) { return std::exp(-x); },
                                      0.0);
    CHECK(std::abs(r1.value - 1.0) < 1e-12);

    auto r2 = integrate_semi_infinite(
        [](double x) { return std::exp(-x * x); }, 0.0);
    CHECK(std::abs(r2.value - std::sqrt(M_PI) / 2.0) < 1e-12);

    // shifted lower endpoint
    auto r3 = integrate_semi_infinite([](double x) { return std::exp(-x); },
                                      2.0);
    CHECK(std::abs(r3.value - std::exp(-2.0)) < 1e-13);
}

TEST_CASE("tolerance failure carries the best estimate") {
    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-15;
    spec.max_subdivisions = 4;  // far too few for the singularity
    bool threw = false;
    try {
        integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.5)); },
                  0.0, 1.0, spec);
    } catch (const ToleranceError& e) {
        threw = true;
        // true value is 2 sqrt(0.5) * 2 = 2.828...; the carried estimate
        // must be in the right neighborhood and the error estimate honest
        CHECK(e.best_value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(0.2));
        CHECK(e.error_estimate > 0.0);
    }
    CHECK(threw);
}

TEST_CASE("invalid spans are rejected") {
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0),
                    DomainError);
}

}  // TEST_SUITE
