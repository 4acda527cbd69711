#include "ksmix/initial_data.hpp"

#include <cmath>
#include <random>

#include "ksmix/errors.hpp"
#include "ksmix/snapshot.hpp"

namespace ksmix {

namespace {
// 1-D periodicized Gaussian factor; |m| <= 4 images suffice for width <= 0.35
// (the next image is exp(-4.5^2/(2*0.35^2)) ~ 1e-36 of the peak).
double theta(double z, double width) {
    double acc = 0.0;
    for (int m = -4; m <= 4; ++m) {
        const double u = (z + m) / width;
        acc += std::exp(-0.5 * u * u);
    }
    return acc;
}

ScalarField mass_normalized(const Grid& g, ArrayXd samples, double mass) {
    const double total = samples.sum() * std::pow(g.h, g.d);
    if (!(total > 0.0)) throw input_error("initial data: nonpositive raw mass, cannot normalize");
    samples *= mass / total;
    return ScalarField::from_samples(g, std::move(samples));
}
}  // namespace

ScalarField bump_field(const Grid& g, double mass, double width, const std::array<double, 3>& center) {
    if (!(mass > 0.0)) throw config_error("bump: mass must be positive");
    if (!(width >= 2.0 * g.h && width <= 0.35))
        throw config_error("bump: width must lie in [2h, 0.35] for a resolved periodicized profile (got " +
                           std::to_string(width) + ")");
    ArrayXd s(g.cells);
    for_each_node(g, [&](std::int64_t idx, const std::array<double, 3>& x) {
        double v = 1.0;
        for (int a = 0; a < g.d; ++a) v *= theta(x[a] - center[a], width);
        s[idx] = v;
    });
    return mass_normalized(g, std::move(s), mass);
}

ScalarField random_smooth_field(const Grid& g, std::uint64_t seed, double decay) {
    if (!(decay >= 2.0)) throw config_error("random_smooth: decay must be >= 2 for a smooth field");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);

    ArrayXcd spec = ArrayXcd::Zero(g.specn);
    const int n = g.n;
    // Stored-slot lookup for lattice modes whose last axis lands on the 0 or
    // n/2 plane (both conjugate-pair members are stored there).
    auto stored_index = [&](const std::array<int, 3>& k) -> std::int64_t {
        std::int64_t idx = 0;
        for (int a = 0; a < g.d - 1; ++a) idx = idx * n + (k[a] >= 0 ? k[a] : k[a] + n);
        return idx * (n / 2 + 1) + k[g.d - 1];
    };
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        if (k == std::array<int, 3>{0, 0, 0}) return;
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) k2 += static_cast<double>(k[a]) * k[a];
        const double amp = std::pow(1.0 + std::sqrt(k2), -decay);

        const int klast = k[g.d - 1];
        if (klast != 0 && klast != n / 2) {
            // interior column: the conjugate lives in the implicit half
            spec[idx] = std::polar(amp, unif(rng));
            return;
        }
        // both pair members stored: negate with n/2 self-paired under wrap
        std::array<int, 3> nk{0, 0, 0};
        bool self = true;
        for (int a = 0; a < g.d; ++a) {
            nk[a] = (k[a] == n / 2) ? k[a] : -k[a];
            if (nk[a] != k[a]) self = false;
        }
        if (self) {
            spec[idx] = (rng() & 1) ? amp : -amp;  // self-conjugate: real value
            return;
        }
        if (nk < k) return;  // pair already filled from its canonical member
        const std::complex<double> v = std::polar(amp, unif(rng));
        spec[idx] = v;
        spec[stored_index(nk)] = std::conj(v);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

ScalarField make_initial(const InitialSpec& spec, const Grid& g) {
    switch (spec.kind) {
        case InitialKind::BUMP:
            return bump_field(g, spec.mass, spec.width, spec.center);
        case InitialKind::TWO_BUMP: {
            std::array<double, 3> c1 = spec.center, c2 = spec.center;
            c1[0] -= 0.5 * spec.separation;
            c2[0] += 0.5 * spec.separation;
            const ScalarField b1 = bump_field(g, 0.5 * spec.mass, spec.width, c1);
            const ScalarField b2 = bump_field(g, 0.5 * spec.mass, spec.width, c2);
            return ScalarField::from_samples(g, b1.samples() + b2.samples());
        }
        case InitialKind::RANDOM_SMOOTH: {
            const ScalarField raw = random_smooth_field(g, spec.seed, spec.decay);
            ArrayXd s = raw.samples();
            s -= s.minCoeff();  // nonnegative datum
            return mass_normalized(g, std::move(s), spec.mass);
        }
        case InitialKind::SNAPSHOT: {
            Snapshot snap = read_snapshot(spec.path);
            if (!(snap.field.grid() == g))
                throw config_error("initial snapshot " + spec.path + " has grid " +
                                   std::to_string(snap.field.grid().d) + "d n=" +
                                   std::to_string(snap.field.grid().n) + ", run needs " +
                                   std::to_string(g.d) + "d n=" + std::to_string(g.n));
            return snap.field;
        }
    }
    throw config_error("make_initial: unknown initial kind");
}

}  // namespace ksmix
