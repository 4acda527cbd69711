#include <cmath>

#include <doctest.h>

#include "ksmix/errors.hpp"
#include "ksmix/operators.hpp"

using namespace ksmix;

TEST_CASE("singular-integral evaluation matches the eigenvalue on a single mode") {
    const Grid g = make_grid(1, 256);
    const ScalarField f = from_function(
        g, [](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * x[0]); });
    for (double alpha : {0.5, 1.0, 1.5}) {
        const double lam = std::pow(2.0 * M_PI, alpha);
        double worst = 0.0;
        for (int j : {0, 17, 64, 128, 200}) {
            const double q = frac_laplacian_quadrature(f, alpha, {j, 0, 0}, 32);
            worst = std::max(worst, std::abs(q - lam * f.samples()[j]) / lam);
        }
        CHECK(worst <= 1e-2);
    }
}

TEST_CASE("constant fields sit in the quadrature kernel") {
    const Grid g = make_grid(2, 32);
    const ScalarField one = from_function(g, [](const std::array<double, 3>&) { return 5.0; });
    CHECK(std::abs(frac_laplacian_quadrature(one, 1.0, {3, 7, 0}, 16)) <= 1e-12);
}

TEST_CASE("image tail bound shrinks with the truncation radius") {
    const Grid g = make_grid(1, 64);
    const ScalarField f = from_function(
        g, [](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * x[0]); });
    const auto r8 = frac_laplacian_quadrature_report(f, 0.5, {5, 0, 0}, 8);
    const auto r32 = frac_laplacian_quadrature_report(f, 0.5, {5, 0, 0}, 32);
    CHECK(r32.tail_bound < r8.tail_bound);
    CHECK(r32.tail_bound > 0.0);
    // the two truncations agree to within the coarser tail bar
    CHECK(std::abs(r8.value - r32.value) <= 2.0 * r8.tail_bound);
}

TEST_CASE("quadrature argument validation") {
    const Grid g = make_grid(1, 32);
    const ScalarField f = from_function(
        g, [](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * x[0]); });
    CHECK_THROWS_AS(frac_laplacian_quadrature(f, 2.0, {0, 0, 0}, 16), config_error);
    CHECK_THROWS_AS(frac_laplacian_quadrature(f, 1.0, {0, 0, 0}, 0), config_error);
    // node indices wrap periodically
    CHECK(frac_laplacian_quadrature(f, 1.0, {32, 0, 0}, 16) ==
          doctest::Approx(frac_laplacian_quadrature(f, 1.0, {0, 0, 0}, 16)).epsilon(1e-15));
}
