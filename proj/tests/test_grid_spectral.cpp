#include <cmath>
#include <complex>
#include <random>

#include <doctest.h>

#include "ksmix/errors.hpp"
#include "ksmix/field.hpp"

using namespace ksmix;

namespace {
// Direct O(n^{2d}) Fourier coefficient of the sample set against the box
// coordinates: c_k = n^{-d} sum_j f(x_j) exp(-2*pi*i k.x_j).  Independent of
// the FFT layout and of the node-phase convention.
std::complex<double> naive_coefficient(const ScalarField& f, const std::array<int, 3>& k) {
    const Grid& g = f.grid();
    std::complex<double> acc = 0.0;
    for_each_node(g, [&](std::int64_t idx, const std::array<double, 3>& x) {
        double phase = 0.0;
        for (int a = 0; a < g.d; ++a) phase += k[a] * x[a];
        acc += f.samples()[idx] * std::polar(1.0, -2.0 * M_PI * phase);
    });
    return acc / static_cast<double>(g.cells);
}

ScalarField random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ArrayXd s(g.cells);
    for (std::int64_t i = 0; i < g.cells; ++i) s[i] = u(rng);
    return ScalarField::from_samples(g, std::move(s));
}
}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(make_grid(2, 7), config_error);   // odd n
    CHECK_THROWS_AS(make_grid(2, 6), config_error);   // n < 8
    CHECK_THROWS_AS(make_grid(0, 16), config_error);  // unsupported d
    CHECK_THROWS_AS(make_grid(4, 16), config_error);
    const Grid g = make_grid(2, 16);
    CHECK(g.h == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(g.cells == 256);
    CHECK(g.specn == 16 * 9);
}

TEST_CASE("node coordinates span the centered box") {
    const Grid g = make_grid(1, 8);
    double first = 1e9, last = -1e9;
    for_each_node(g, [&](std::int64_t, const std::array<double, 3>& x) {
        first = std::min(first, x[0]);
        last = std::max(last, x[0]);
    });
    CHECK(first == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(last == doctest::Approx(0.5 - g.h).epsilon(1e-15));
}

TEST_CASE("coefficients match the naive DFT against box coordinates") {
    for (int d : {1, 2}) {
        const Grid g = make_grid(d, 8);
        const ScalarField f = random_field(g, 17 + d);
        std::vector<std::array<int, 3>> ks = {
            {0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {4, 0, 0}, {-2, 0, 0}};
        if (d == 2) {
            ks.push_back({1, 2, 0});
            ks.push_back({-3, 1, 0});
            ks.push_back({4, -2, 0});
            ks.push_back({0, -1, 0});
        }
        for (const auto& k : ks) {
            const std::complex<double> a = f.coefficient(k);
            const std::complex<double> b = naive_coefficient(f, k);
            CHECK(std::abs(a - b) <= 1e-13);
        }
    }
}

TEST_CASE("transform round-trip and mean") {
    const Grid g = make_grid(2, 32);
    const ScalarField f = random_field(g, 99);
    const ScalarField back = inverse_transform(g, transform(f));
    CHECK((back.samples() - f.samples()).abs().maxCoeff() <= 1e-13);
    CHECK(mean(f) == doctest::Approx(f.samples().mean()).epsilon(1e-13));
    CHECK(std::abs(f.coefficient({0, 0, 0}) - std::complex<double>(mean(f))) <= 1e-15);
}

TEST_CASE("mode iteration covers the half-spectrum once, Parseval weights sum to n^d") {
    for (int d : {1, 2, 3}) {
        const Grid g = make_grid(d, 8);
        std::int64_t count = 0;
        double wsum = 0.0;
        for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
            CHECK(idx == count);
            ++count;
            wsum += mode_weight(g, k);
        });
        CHECK(count == g.specn);
        double cells = 1.0;
        for (int a = 0; a < d; ++a) cells *= g.n;
        CHECK(wsum == doctest::Approx(cells).epsilon(1e-15));
    }
}

TEST_CASE("Parseval: weighted spectral energy equals the L2 norm") {
    const Grid g = make_grid(2, 16);
    const ScalarField f = random_field(g, 5);
    double acc = 0.0;
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        acc += mode_weight(g, k) * std::norm(f.spectrum()[idx]);
    });
    const double l2 = lp_norm(f, 2.0);
    CHECK(std::sqrt(acc) == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("eval reproduces samples at nodes and interpolates a pure mode exactly") {
    const Grid g = make_grid(2, 16);
    const ScalarField f = random_field(g, 31);
    std::array<int, 3> idx{3, 11, 0};
    const std::array<double, 3> x = node_coord(g, idx);
    CHECK(f.eval(x) == doctest::Approx(f.samples()[3 * 16 + 11]).epsilon(1e-12));

    const ScalarField c = from_function(
        g, [](const std::array<double, 3>& y) { return std::cos(2.0 * M_PI * (2 * y[0] - y[1])); });
    CHECK(c.eval({0.131, -0.377, 0.0}) ==
          doctest::Approx(std::cos(2.0 * M_PI * (2 * 0.131 + 0.377))).epsilon(1e-10));
}

TEST_CASE("lp_norm scaling oracles") {
    const Grid g = make_grid(1, 64);
    const ScalarField one = from_function(g, [](const std::array<double, 3>&) { return 1.0; });
    CHECK(lp_norm(one, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_norm(one, 7.0) == doctest::Approx(1.0).epsilon(1e-14));
    const ScalarField c =
        from_function(g, [](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * x[0]); });
    CHECK(lp_norm(c, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));  // ||cos||_2 = 1/sqrt(2)
    CHECK(lp_norm(c, p_inf) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(lp_norm(c, 0.5), input_error);
}

TEST_CASE("lp_norm is monotone in p for fields bounded by 1") {
    const Grid g = make_grid(2, 32);
    ScalarField f = random_field(g, 71);
    f = ScalarField::from_samples(g, f.samples() / f.samples().abs().maxCoeff());
    double prev = lp_norm(f, 1.0);
    for (double p : {2.0, 4.0, 8.0}) {
        const double cur = lp_norm(f, p);
        CHECK(cur >= prev * (1.0 - 1e-12));  // |Omega| = 1: Hoelder makes p -> ||f||_p non-decreasing
        prev = cur;
    }
    CHECK(lp_norm(f, p_inf) <= 1.0 + 1e-12);
}

TEST_CASE("dealias keeps the band and zeroes above the cutoff") {
    const Grid g = make_grid(1, 32);
    const int cut = dealias_cutoff(g);
    CHECK(cut == 10);  // floor(32/3)
    const ScalarField keep = from_function(
        g, [&](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * cut * x[0]); });
    const ScalarField gone = from_function(
        g, [&](const std::array<double, 3>& x) { return std::cos(2.0 * M_PI * (cut + 1) * x[0]); });
    CHECK((dealias(keep).samples() - keep.samples()).abs().maxCoeff() <= 1e-13);
    CHECK(dealias(gone).samples().abs().maxCoeff() <= 1e-13);
    // idempotent
    const ScalarField f = random_field(g, 12);
    const ScalarField once = dealias(f);
    CHECK((dealias(once).samples() - once.samples()).abs().maxCoeff() <= 1e-14);
}
