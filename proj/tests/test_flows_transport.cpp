#include <cmath>
#include <memory>

#include <doctest.h>

#include "ksmix/errors.hpp"
#include "ksmix/flows.hpp"
#include "ksmix/initial_data.hpp"
#include "ksmix/transport.hpp"

using namespace ksmix;

namespace {
FlowSpec steady(double A, ShearProfile pr = ShearProfile::SIN) {
    FlowSpec f;
    f.kind = FlowKind::STEADY_SHEAR;
    f.amplitude = A;
    f.profile = pr;
    return f;
}

FlowSpec alternating(double A, double T) {
    FlowSpec f;
    f.kind = FlowKind::ALTERNATING_SHEAR;
    f.amplitude = A;
    f.switch_period = T;
    return f;
}
}  // namespace

TEST_CASE("flow validation") {
    const Grid g1 = make_grid(1, 32), g2 = make_grid(2, 32);
    CHECK_THROWS_AS(validate_flow(steady(1.0), g1), config_error);  // shears need d >= 2
    FlowSpec bad = steady(-1.0);
    CHECK_THROWS_AS(validate_flow(bad, g2), config_error);
    FlowSpec alt = alternating(1.0, 0.0);
    CHECK_THROWS_AS(validate_flow(alt, g2), config_error);  // switch_period > 0
    FlowSpec sf;
    sf.kind = FlowKind::STREAM_FUNCTION;
    sf.amplitude = 1.0;
    CHECK_THROWS_AS(validate_flow(sf, g2), config_error);  // psi missing
    sf.stream = std::make_shared<ScalarField>(random_smooth_field(g2, 1, 3.0));
    CHECK_NOTHROW(validate_flow(sf, g2));
    CHECK_THROWS_AS(validate_flow(sf, make_grid(1, 32)), config_error);  // d=2 only
}

TEST_CASE("steady shear velocity closed form") {
    const Grid g = make_grid(2, 32);
    const VectorField u = velocity(steady(2.0, ShearProfile::COS), 0.3, g);
    const ScalarField expect = from_function(
        g, [](const std::array<double, 3>& x) { return 2.0 * std::cos(2.0 * M_PI * x[1]); });
    CHECK((u.comp(0).samples() - expect.samples()).abs().maxCoeff() <= 1e-13);
    CHECK(u.comp(1).samples().abs().maxCoeff() == 0.0);
    CHECK(max_speed(steady(2.0), g) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("alternating shear swaps axes per interval") {
    const Grid g = make_grid(2, 32);
    const FlowSpec f = alternating(3.0, 0.5);
    CHECK(switch_interval(f, 0.1) == 0);
    CHECK(switch_interval(f, 0.6) == 1);
    CHECK(switch_interval(f, 0.5) == 1);                  // boundary belongs to the next interval
    CHECK(switch_interval(f, 0.5 - 1e-12 * 0.5) == 1);    // robust to rounding at the switch
    const VectorField u0 = velocity(f, 0.1, g);
    const VectorField u1 = velocity(f, 0.6, g);
    CHECK(u0.comp(1).samples().abs().maxCoeff() == 0.0);
    CHECK(u1.comp(0).samples().abs().maxCoeff() == 0.0);
    const ScalarField e0 = from_function(
        g, [](const std::array<double, 3>& x) { return 3.0 * std::sin(2.0 * M_PI * x[1]); });
    const ScalarField e1 = from_function(
        g, [](const std::array<double, 3>& x) { return 3.0 * std::sin(2.0 * M_PI * x[0]); });
    CHECK((u0.comp(0).samples() - e0.samples()).abs().maxCoeff() <= 1e-13);
    CHECK((u1.comp(1).samples() - e1.samples()).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("every built-in flow is divergence free") {
    const Grid g = make_grid(2, 64);
    CHECK(check_divergence_free(steady(5.0), 0.0, g) <= 1e-11 * 5.0);
    CHECK(check_divergence_free(alternating(5.0, 0.25), 0.3, g) <= 1e-11 * 5.0);
    FlowSpec sf;
    sf.kind = FlowKind::STREAM_FUNCTION;
    sf.amplitude = 5.0;
    sf.stream = std::make_shared<ScalarField>(random_smooth_field(g, 99, 3.0));
    CHECK(check_divergence_free(sf, 0.0, g) <= 1e-11 * 5.0);
}

TEST_CASE("transport under the zero flow is the identity") {
    const Grid g = make_grid(2, 32);
    const ScalarField f = random_smooth_field(g, 4, 3.0);
    const ScalarField out = transport_solve(f, FlowSpec{}, 2.5, 0.1);
    CHECK((out.samples() == f.samples()).all());
}

TEST_CASE("transport CFL guard") {
    const Grid g = make_grid(2, 32);
    const ScalarField f = random_smooth_field(g, 4, 3.0);
    // dt bound is h / (2 max|u|) = (1/32) / 2 at A=1
    CHECK_THROWS_AS(TransportSolver(f, steady(1.0), 0.5), config_error);
    CHECK_NOTHROW(TransportSolver(f, steady(1.0), 1.0 / 64.0));
}

TEST_CASE("steady shear transport follows the characteristics") {
    const Grid g = make_grid(2, 64);
    const ScalarField rho0 = from_function(
        g, [](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * x[0]); });
    const double A = 1.0, T = 0.3;
    const ScalarField w = transport_solve(rho0, steady(A), T, g.h / 2.0);
    const ScalarField exact = from_function(g, [&](const std::array<double, 3>& x) {
        return std::cos(2.0 * M_PI * (x[0] - A * T * std::sin(2.0 * M_PI * x[1])));
    });
    CHECK((w.samples() - exact.samples()).abs().maxCoeff() <= 1e-3);
    // max principle: pure transport stays inside the initial range
    CHECK(w.samples().maxCoeff() <= rho0.samples().maxCoeff() + 1e-12);
    CHECK(w.samples().minCoeff() >= rho0.samples().minCoeff() - 1e-12);
}

TEST_CASE("alternating shear composes the two shear maps across a switch") {
    const Grid g = make_grid(2, 128);
    const ScalarField rho0 = from_function(
        g, [](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * x[0]); });
    const double A = 1.0, Tsw = 0.2;
    // dt divides the switch interval so no step straddles the velocity flip
    const ScalarField w = transport_solve(rho0, alternating(A, Tsw), 2.0 * Tsw, Tsw / 52.0);
    const ScalarField exact = from_function(g, [&](const std::array<double, 3>& x) {
        const double x1_pre = x[1] - A * Tsw * std::sin(2.0 * M_PI * x[0]);  // undo interval 1
        return std::cos(2.0 * M_PI * (x[0] - A * Tsw * std::sin(2.0 * M_PI * x1_pre)));
    });
    CHECK((w.samples() - exact.samples()).abs().maxCoeff() <= 2e-3);
}

TEST_CASE("stream-function transport reproduces the equivalent shear") {
    const Grid g = make_grid(2, 64);
    // psi = -cos(2*pi*x2)/(2*pi)  =>  u = A*(-d2 psi, d1 psi) = (-A*sin(2*pi*x2), 0)
    FlowSpec sf;
    sf.kind = FlowKind::STREAM_FUNCTION;
    sf.amplitude = 1.0;
    sf.stream = std::make_shared<ScalarField>(from_function(
        g, [](const std::array<double, 3>& x) { return -std::cos(2.0 * M_PI * x[1]) / (2.0 * M_PI); }));
    const ScalarField rho0 = from_function(
        g, [](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * x[0]); });
    const double T = 0.25;
    const ScalarField w = transport_solve(rho0, sf, T, g.h / 4.0);
    const ScalarField exact = from_function(g, [&](const std::array<double, 3>& x) {
        return std::cos(2.0 * M_PI * (x[0] + T * std::sin(2.0 * M_PI * x[1])));
    });
    CHECK((w.samples() - exact.samples()).abs().maxCoeff() <= 5e-3);
    // mean is preserved exactly by the interpolation weights
    CHECK(std::abs(mean(w) - mean(rho0)) <= 1e-13);
}
