#include "ksmix/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ksmix/errors.hpp"

namespace ksmix {

namespace {
constexpr double two_pi = 2.0 * M_PI;

double kappa_sq(const std::array<int, 3>& k, int d) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += static_cast<double>(k[a]) * k[a];
    return two_pi * two_pi * s;
}

// True when k sits on a Nyquist row of any axis; odd (derivative) symbols must
// vanish there because the -n/2 mode has no +n/2 partner.
bool on_nyquist(const Grid& g, const std::array<int, 3>& k) {
    for (int a = 0; a < g.d; ++a)
        if (k[a] == -g.n / 2 || k[a] == g.n / 2) return true;
    return false;
}
}  // namespace

ScalarField frac_laplacian(const ScalarField& f, double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw config_error("frac_laplacian: alpha must lie in (0,2] (got " + std::to_string(alpha) + ")");
    const Grid& g = f.grid();
    ArrayXcd spec = f.spectrum();
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        const double k2 = kappa_sq(k, g.d);
        spec[idx] *= (k2 == 0.0) ? 0.0 : std::pow(k2, alpha / 2.0);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

double frac_constant(double alpha, int d) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw config_error("frac_constant: alpha must lie strictly in (0,2), Gamma(-alpha/2) degenerates at the endpoints (got " +
                           std::to_string(alpha) + ")");
    const double num = std::pow(2.0, alpha) * std::tgamma((d + alpha) / 2.0);
    const double den = std::pow(M_PI, d / 2.0) * std::abs(std::tgamma(-alpha / 2.0));
    return num / den;
}

VectorField attractive_drift(const ScalarField& rho, double beta) {
    const Grid& g = rho.grid();
    if (!(beta >= 2.0 && beta <= std::max(2.0, static_cast<double>(g.d))))
        throw config_error("attractive_drift: beta must lie in [2,max(d,2)]; got beta=" + std::to_string(beta) +
                           " with d=" + std::to_string(g.d));
    const ArrayXcd& spec = rho.spectrum();
    const double expo = -(g.d + 2.0 - beta);
    VectorField B(g);
    for (int a = 0; a < g.d; ++a) {
        ArrayXcd bs = ArrayXcd::Zero(g.specn);
        for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
            const double k2 = kappa_sq(k, g.d);
            if (k2 == 0.0 || on_nyquist(g, k)) return;
            const double mag = std::pow(k2, expo / 2.0);
            bs[idx] = spec[idx] * std::complex<double>(0.0, two_pi * k[a] * mag);
        });
        B.comp(a) = ScalarField::from_spectrum(g, std::move(bs));
    }
    return B;
}

ScalarField div_rho_drift(const ScalarField& rho, double beta) {
    const Grid& g = rho.grid();
    VectorField B = attractive_drift(rho, beta);
    const ArrayXcd& spec = rho.spectrum();

    // div B = -|kappa|^{beta-d} on the mean-zero part.
    ArrayXcd divb = ArrayXcd::Zero(g.specn);
    ArrayXcd grads[3];
    for (int a = 0; a < g.d; ++a) grads[a] = ArrayXcd::Zero(g.specn);
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        const double k2 = kappa_sq(k, g.d);
        if (k2 != 0.0) divb[idx] = -std::pow(k2, (beta - g.d) / 2.0) * spec[idx];
        if (!on_nyquist(g, k))
            for (int a = 0; a < g.d; ++a)
                grads[a][idx] = spec[idx] * std::complex<double>(0.0, two_pi * k[a]);
    });

    ScalarField divb_f = dealias(ScalarField::from_spectrum(g, std::move(divb)));
    ArrayXd acc = rho.samples() * divb_f.samples();
    for (int a = 0; a < g.d; ++a) {
        ScalarField ga = dealias(ScalarField::from_spectrum(g, std::move(grads[a])));
        acc += ga.samples() * dealias(B.comp(a)).samples();
    }
    return dealias(ScalarField::from_samples(g, std::move(acc)));
}

ScalarField inv_frac_laplacian(const ScalarField& f, double s) {
    if (!(s > 0.0))
        throw config_error("inv_frac_laplacian: order s must be positive (got " + std::to_string(s) + ")");
    const Grid& g = f.grid();
    ArrayXcd spec = f.spectrum();
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        const double k2 = kappa_sq(k, g.d);
        spec[idx] *= (k2 == 0.0) ? 0.0 : std::pow(k2, -s / 2.0);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

double sobolev_seminorm(const ScalarField& f, double s) {
    if (!(s >= 0.0))
        throw input_error("sobolev_seminorm: s must be >= 0 (got " + std::to_string(s) + ")");
    const Grid& g = f.grid();
    const ArrayXcd& spec = f.spectrum();
    double acc = 0.0;
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        const double k2 = kappa_sq(k, g.d);
        if (k2 == 0.0) return;
        acc += mode_weight(g, k) * std::pow(k2, s) * std::norm(spec[idx]);
    });
    return std::sqrt(acc);
}

namespace {
// Low-mode ordering shared by project_low and the RAGE diagnostic: full-lattice
// modes sorted by (|k|^2, lexicographic k).  Conjugate pairs are walked
// together so projections of real fields stay real.
struct LatticeMode {
    long k2;
    std::array<int, 3> k;
};

std::vector<LatticeMode> sorted_modes(const Grid& g) {
    std::vector<LatticeMode> modes;
    modes.reserve(g.cells);
    const int n = g.n;
    auto push = [&](int k0, int k1, int k2) {
        std::array<int, 3> k{k0, k1, k2};
        long q = 0;
        for (int a = 0; a < g.d; ++a) q += static_cast<long>(k[a]) * k[a];
        modes.push_back({q, k});
    };
    if (g.d == 1)
        for (int a = -n / 2; a < n / 2; ++a) push(a, 0, 0);
    else if (g.d == 2)
        for (int a = -n / 2; a < n / 2; ++a)
            for (int b = -n / 2; b < n / 2; ++b) push(a, b, 0);
    else
        for (int a = -n / 2; a < n / 2; ++a)
            for (int b = -n / 2; b < n / 2; ++b)
                for (int c = -n / 2; c < n / 2; ++c) push(a, b, c);
    std::stable_sort(modes.begin(), modes.end(), [](const LatticeMode& x, const LatticeMode& y) {
        if (x.k2 != y.k2) return x.k2 < y.k2;
        return x.k < y.k;
    });
    return modes;
}
}  // namespace

ScalarField project_low(const ScalarField& f, int N) {
    const Grid& g = f.grid();
    if (N < 1) throw config_error("project_low: N must be >= 1");
    if (N > g.cells)
        throw config_error("project_low: N=" + std::to_string(N) + " exceeds the " +
                           std::to_string(g.cells) + " modes of the grid");

    ArrayXcd out = ArrayXcd::Zero(g.specn);
    const ArrayXcd& spec = f.spectrum();
    const auto modes = sorted_modes(g);
    // Stored location of a lattice mode, or -1 when it lives in the implicit
    // conjugate half.  Modes on the last-axis 0 / -n/2 planes are stored for
    // both pair members, and -n/2 wraps to the +n/2 column.
    auto stored_index = [&](const std::array<int, 3>& k) -> std::int64_t {
        const int kl = k[g.d - 1];
        if (kl < 0 && kl != -g.n / 2) return -1;
        std::int64_t idx = 0;
        for (int a = 0; a < g.d - 1; ++a) idx = idx * g.n + (k[a] >= 0 ? k[a] : k[a] + g.n);
        return idx * (g.n / 2 + 1) + (kl >= 0 ? kl : kl + g.n);
    };
    int used = 0;
    std::vector<bool> taken(modes.size(), false);
    for (std::size_t i = 0; i < modes.size() && used < N; ++i) {
        if (taken[i]) continue;
        const std::array<int, 3>& k = modes[i].k;
        std::array<int, 3> nk{0, 0, 0};
        bool self = true;
        for (int a = 0; a < g.d; ++a) {
            // -n/2 is its own negative on the periodic lattice
            nk[a] = (k[a] == -g.n / 2) ? k[a] : -k[a];
            if (nk[a] != k[a]) self = false;
        }
        if (self) {
            const std::int64_t idx = stored_index(k);
            out[idx] = spec[idx];
            ++used;
            continue;
        }
        for (std::size_t j = i + 1; j < modes.size(); ++j)
            if (modes[j].k == nk) {
                taken[j] = true;
                break;
            }
        const std::int64_t ia = stored_index(k), ib = stored_index(nk);
        if (N - used >= 2) {
            if (ia >= 0) out[ia] = spec[ia];
            if (ib >= 0) out[ib] = spec[ib];
            used += 2;
        } else {
            // room for one real eigenfunction only: keep the cosine part.
            // Both pair members share the node-phase parity, so one refold
            // sign serves every stored location.
            const std::array<int, 3>& rep = ia >= 0 ? k : nk;
            const std::complex<double> c = f.coefficient(rep);
            const double sign = ((rep[0] + rep[1] + rep[2]) & 1) ? -1.0 : 1.0;
            if (ia >= 0) out[ia] = sign * c.real();
            if (ib >= 0) out[ib] = sign * c.real();
            ++used;
        }
    }
    return ScalarField::from_spectrum(g, std::move(out));
}

}  // namespace ksmix
