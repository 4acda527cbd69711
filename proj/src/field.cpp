#include "ksmix/field.hpp"

#include <cmath>
#include <string>

#include "ksmix/errors.hpp"
#include "ksmix/spectral.hpp"

namespace ksmix {

ScalarField::ScalarField(const Grid& g) : grid_(g) {
    samples_ = ArrayXd::Zero(g.cells);
    have_samples_ = true;
    spec_ = ArrayXcd::Zero(g.specn);
    have_spec_ = true;
}

ScalarField ScalarField::from_samples(const Grid& g, ArrayXd samples) {
    if (samples.size() != g.cells)
        throw input_error("ScalarField: sample array has " + std::to_string(samples.size()) +
                          " entries, grid needs " + std::to_string(g.cells));
    ScalarField f;
    f.grid_ = g;
    f.samples_ = std::move(samples);
    f.have_samples_ = true;
    return f;
}

ScalarField ScalarField::from_spectrum(const Grid& g, ArrayXcd spec) {
    if (spec.size() != g.specn)
        throw input_error("ScalarField: spectrum array has " + std::to_string(spec.size()) +
                          " entries, grid needs " + std::to_string(g.specn));
    ScalarField f;
    f.grid_ = g;
    f.spec_ = std::move(spec);
    f.have_spec_ = true;
    return f;
}

void ScalarField::sync_samples() const {
    if (have_samples_) return;
    samples_.resize(grid_.cells);
    SpectralEngine::get(grid_).backward(spec_.data(), samples_.data());
    have_samples_ = true;
}

void ScalarField::sync_spec() const {
    if (have_spec_) return;
    spec_.resize(grid_.specn);
    SpectralEngine::get(grid_).forward(samples_.data(), spec_.data());
    have_spec_ = true;
}

const ArrayXd& ScalarField::samples() const {
    sync_samples();
    return samples_;
}

const ArrayXcd& ScalarField::spectrum() const {
    sync_spec();
    return spec_;
}

void ScalarField::set_samples(ArrayXd samples) {
    if (samples.size() != grid_.cells) throw input_error("set_samples: wrong size");
    samples_ = std::move(samples);
    have_samples_ = true;
    have_spec_ = false;
}

void ScalarField::set_spectrum(ArrayXcd spec) {
    if (spec.size() != grid_.specn) throw input_error("set_spectrum: wrong size");
    spec_ = std::move(spec);
    have_spec_ = true;
    have_samples_ = false;
}

std::complex<double> ScalarField::coefficient(const std::array<int, 3>& k) const {
    sync_spec();
    const int n = grid_.n;
    std::array<int, 3> kk{0, 0, 0};
    int ksum = 0;
    for (int a = 0; a < grid_.d; ++a) {
        if (k[a] < -n / 2 || k[a] >= n / 2 + 1)
            throw input_error("coefficient: mode index out of range");
        kk[a] = k[a];
        ksum += k[a];
    }
    bool conj = false;
    if (kk[grid_.d - 1] < 0) {  // unstored half: c(-k) = conj(c(k))
        for (int a = 0; a < grid_.d; ++a) kk[a] = -kk[a];
        conj = true;
    }
    std::int64_t idx = 0;
    for (int a = 0; a < grid_.d - 1; ++a) {
        int ja = kk[a] >= 0 ? kk[a] : kk[a] + n;
        idx = idx * n + ja;
    }
    idx = idx * (n / 2 + 1) + kk[grid_.d - 1];
    std::complex<double> c = spec_[idx];
    if (conj) c = std::conj(c);
    // Node 0 sits at x=-1/2, so the raw DFT coefficient of mode k carries a
    // phase e^{2 pi i k/2} = (-1)^k per axis relative to the box coefficient.
    if (ksum & 1) c = -c;
    return c;
}

double ScalarField::eval(const std::array<double, 3>& x) const {
    sync_spec();
    const Grid& g = grid_;
    double acc = 0.0;
    const double two_pi = 2.0 * M_PI;
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        double ph = 0.0;
        for (int a = 0; a < g.d; ++a) ph += k[a] * (x[a] + 0.5);  // node layout phase origin
        const std::complex<double> e(std::cos(two_pi * ph), std::sin(two_pi * ph));
        acc += mode_weight(g, k) * std::real(spec_[idx] * e);
    });
    return acc;
}

VectorField::VectorField(const Grid& g) : grid_(g) {
    for (int a = 0; a < g.d; ++a) comps_[a] = ScalarField(g);
}

ScalarField from_function(const Grid& g, const std::function<double(const std::array<double, 3>&)>& f) {
    ArrayXd samples(g.cells);
    for_each_node(g, [&](std::int64_t idx, const std::array<double, 3>& x) { samples[idx] = f(x); });
    if (!samples.isFinite().all())
        throw input_error("from_function: sampled field contains non-finite values");
    return ScalarField::from_samples(g, std::move(samples));
}

ArrayXcd transform(const ScalarField& f) { return f.spectrum(); }

ScalarField inverse_transform(const Grid& g, const ArrayXcd& spec) {
    return ScalarField::from_spectrum(g, spec);
}

int dealias_cutoff(const Grid& g) { return g.n / 3; }

ScalarField dealias(const ScalarField& f) {
    const Grid& g = f.grid();
    const int cut = dealias_cutoff(g);
    ArrayXcd spec = f.spectrum();
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        for (int a = 0; a < g.d; ++a)
            if (std::abs(k[a]) > cut) {
                spec[idx] = 0.0;
                return;
            }
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

double lp_norm(const ScalarField& f, double p) {
    if (!(p >= 1.0))
        throw input_error("lp_norm: p must be >= 1 (got " + std::to_string(p) + ")");
    const ArrayXd& s = f.samples();
    if (std::isinf(p)) return s.abs().maxCoeff();
    const double hd = 1.0 / static_cast<double>(f.grid().cells);
    if (p == 1.0) return hd * s.abs().sum();
    if (p == 2.0) return std::sqrt(hd * s.square().sum());
    return std::pow(hd * s.abs().pow(p).sum(), 1.0 / p);
}

double mean(const ScalarField& f) {
    const ArrayXd& s = f.samples();
    return s.sum() / static_cast<double>(f.grid().cells);
}

}  // namespace ksmix
