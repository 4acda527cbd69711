#include "ksmix/flows.hpp"

#include <cmath>
#include <string>

#include "ksmix/errors.hpp"

namespace ksmix {

namespace {
constexpr double two_pi = 2.0 * M_PI;

bool on_nyquist(const Grid& g, const std::array<int, 3>& k) {
    for (int a = 0; a < g.d; ++a)
        if (k[a] == -g.n / 2 || k[a] == g.n / 2) return true;
    return false;
}

// Spectral partial derivative along axis a (odd multiplier, Nyquist zeroed).
ScalarField spectral_deriv(const ScalarField& f, int a) {
    const Grid& g = f.grid();
    ArrayXcd spec = f.spectrum();
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
        spec[idx] *= on_nyquist(g, k) ? 0.0 : std::complex<double>(0.0, two_pi * k[a]);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

// Shear samples u_axis(x) = A * v(x_cross) as a full field.
ScalarField shear_component(const Grid& g, ShearProfile p, double A, int cross_axis) {
    ArrayXd s(g.cells);
    for_each_node(g, [&](std::int64_t idx, const std::array<double, 3>& x) {
        s[idx] = A * shear_profile_value(p, x[cross_axis]);
    });
    return ScalarField::from_samples(g, std::move(s));
}
}  // namespace

const char* to_string(FlowKind k) {
    switch (k) {
        case FlowKind::ZERO: return "zero";
        case FlowKind::STEADY_SHEAR: return "steady_shear";
        case FlowKind::ALTERNATING_SHEAR: return "alternating_shear";
        case FlowKind::STREAM_FUNCTION: return "stream_function";
    }
    return "?";
}

double shear_profile_value(ShearProfile p, double x) {
    return p == ShearProfile::SIN ? std::sin(two_pi * x) : std::cos(two_pi * x);
}

long switch_interval(const FlowSpec& flow, double t) {
    const double T = flow.switch_period;
    return static_cast<long>(std::floor(t / T + 1e-9));
}

void validate_flow(const FlowSpec& flow, const Grid& g) {
    if (!(flow.amplitude >= 0.0))
        throw config_error("flow.amplitude must be nonnegative (got " + std::to_string(flow.amplitude) + ")");
    switch (flow.kind) {
        case FlowKind::ZERO:
            return;
        case FlowKind::STEADY_SHEAR:
        case FlowKind::ALTERNATING_SHEAR:
            if (g.d < 2) throw config_error("shear flows need d >= 2 (a 1-D incompressible flow is constant)");
            if (flow.kind == FlowKind::ALTERNATING_SHEAR && !(flow.switch_period > 0.0))
                throw config_error("flow.switch_period must be positive");
            return;
        case FlowKind::STREAM_FUNCTION:
            if (g.d != 2) throw config_error("stream-function flows are defined for d = 2 only");
            if (!flow.stream || flow.stream->empty())
                throw config_error("stream-function flow needs a stream field (flow.stream_snapshot)");
            if (!(flow.stream->grid() == g))
                throw config_error("stream field grid does not match the run grid");
            return;
    }
    throw config_error("unknown flow kind");
}

VectorField velocity(const FlowSpec& flow, double t, const Grid& g) {
    if (!(t >= 0.0)) throw input_error("velocity: t must be >= 0");
    validate_flow(flow, g);
    VectorField u(g);
    for (int a = 0; a < g.d; ++a) u.comp(a) = ScalarField(g);
    const double A = flow.amplitude;

    switch (flow.kind) {
        case FlowKind::ZERO:
            break;
        case FlowKind::STEADY_SHEAR:
            u.comp(0) = shear_component(g, flow.profile, A, 1);
            break;
        case FlowKind::ALTERNATING_SHEAR:
            if (switch_interval(flow, t) % 2 == 0)
                u.comp(0) = shear_component(g, flow.profile, A, 1);
            else
                u.comp(1) = shear_component(g, flow.profile, A, 0);
            break;
        case FlowKind::STREAM_FUNCTION: {
            const ScalarField& psi = *flow.stream;
            u.comp(0) = ScalarField::from_samples(g, -A * spectral_deriv(psi, 1).samples());
            u.comp(1) = ScalarField::from_samples(g, A * spectral_deriv(psi, 0).samples());
            break;
        }
    }
    return u;
}

double check_divergence_free(const FlowSpec& flow, double t, const Grid& g) {
    VectorField u = velocity(flow, t, g);
    ArrayXcd div = ArrayXcd::Zero(g.specn);
    for (int a = 0; a < g.d; ++a) {
        const ArrayXcd& ua = u.comp(a).spectrum();
        for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
            if (!on_nyquist(g, k)) div[idx] += ua[idx] * std::complex<double>(0.0, two_pi * k[a]);
        });
    }
    return lp_norm(ScalarField::from_spectrum(g, std::move(div)), p_inf);
}

double max_speed(const FlowSpec& flow, const Grid& g) {
    validate_flow(flow, g);
    switch (flow.kind) {
        case FlowKind::ZERO:
            return 0.0;
        case FlowKind::STEADY_SHEAR:
        case FlowKind::ALTERNATING_SHEAR:
            return flow.amplitude;  // |sin|, |cos| <= 1, attained
        case FlowKind::STREAM_FUNCTION: {
            VectorField u = velocity(flow, 0.0, g);
            double m = 0.0;
            for (int a = 0; a < g.d; ++a) m = std::max(m, lp_norm(u.comp(a), p_inf));
            return m;
        }
    }
    return 0.0;
}

}  // namespace ksmix
