#include "ksmix/transport.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ksmix/errors.hpp"

namespace ksmix {

namespace {
// Catmull-Rom weights for fractional offset s in [0,1); they sum to 1 exactly
// in exact arithmetic, so line sums (and hence the mean) are preserved.
inline void cr_weights(double s, double w[4]) {
    const double s2 = s * s, s3 = s2 * s;
    w[0] = 0.5 * (-s + 2.0 * s2 - s3);
    w[1] = 0.5 * (2.0 - 5.0 * s2 + 3.0 * s3);
    w[2] = 0.5 * (s + 4.0 * s2 - 3.0 * s3);
    w[3] = 0.5 * (-s2 + s3);
}

inline int wrap(int j, int n) {
    if (j < 0) return j + n;
    if (j >= n) return j - n;
    return j;
}

inline int wrap_far(long j, int n) {
    long r = j % n;
    return static_cast<int>(r < 0 ? r + n : r);
}
}  // namespace

TransportSolver::TransportSolver(const ScalarField& rho0, const FlowSpec& flow, double dt)
    : grid_(rho0.grid()), flow_(flow), dt_(dt), samples_(rho0.samples()), scratch_(rho0.grid().cells)
{
    validate_flow(flow_, grid_);
    if (!(dt_ > 0.0)) throw config_error("transport: dt must be positive");
    const double vmax = max_speed(flow_, grid_);
    const double limit = vmax > 0.0 ? grid_.h / (2.0 * vmax) : std::numeric_limits<double>::infinity();
    if (dt_ > limit * (1.0 + 1e-12))
        throw config_error("transport: dt=" + std::to_string(dt_) + " violates the CFL bound h/(2 max|u|); use dt <= " +
                           std::to_string(limit));
}

ScalarField TransportSolver::state() const { return ScalarField::from_samples(grid_, samples_); }

double TransportSolver::next_switch() const {
    if (flow_.kind != FlowKind::ALTERNATING_SHEAR) return std::numeric_limits<double>::infinity();
    return (switch_interval(flow_, t_) + 1) * flow_.switch_period;
}

void TransportSolver::advance_to(double target) {
    if (target < t_ - 1e-12) throw input_error("transport: cannot advance backward in time");
    if (flow_.kind == FlowKind::ZERO) {  // transport is the identity
        t_ = target;
        return;
    }
    while (t_ < target - 1e-13 * std::max(1.0, target)) {
        const double sw = next_switch();
        const double dt_eff = std::min({dt_, target - t_, sw - t_});
        step(dt_eff);
        // land exactly on snapped instants so interval parity stays clean
        if (sw - (t_ + dt_eff) < 1e-12 * flow_.switch_period)
            t_ = sw;
        else
            t_ += dt_eff;
    }
    t_ = target;
}

void TransportSolver::step(double dt_eff) {
    switch (flow_.kind) {
        case FlowKind::ZERO:
            return;
        case FlowKind::STEADY_SHEAR:
            shear_step(dt_eff, 0, 1);
            return;
        case FlowKind::ALTERNATING_SHEAR:
            if (switch_interval(flow_, t_) % 2 == 0)
                shear_step(dt_eff, 0, 1);
            else
                shear_step(dt_eff, 1, 0);
            return;
        case FlowKind::STREAM_FUNCTION:
            general_step(dt_eff);
            return;
    }
}

// Shift every grid line along `axis` by the constant backtraced displacement
// dt*A*v(x_cross); RK4 on the true characteristics reduces to exactly this
// because the cross coordinate never moves.
void TransportSolver::shear_step(double dt_eff, int axis, int cross) {
    const int n = grid_.n;
    const double coef = dt_eff * flow_.amplitude / grid_.h;  // displacement in index units
    const double* in = samples_.data();
    double* out = scratch_.data();

    auto line_shift = [&](double xc, std::int64_t base, std::int64_t stride) {
        const double c = coef * shear_profile_value(flow_.profile, xc);
        const double q0f = std::floor(-c);
        const double s = -c - q0f;
        const int q0 = static_cast<int>(q0f);
        double w[4];
        cr_weights(s, w);
        int tap[4];
        for (int q = 0; q < 4; ++q) tap[q] = wrap_far(q0 - 1 + q, n);
        for (int j = 0; j < n; ++j) {
            out[base + j * stride] = w[0] * in[base + tap[0] * stride] + w[1] * in[base + tap[1] * stride] +
                                     w[2] * in[base + tap[2] * stride] + w[3] * in[base + tap[3] * stride];
            for (int q = 0; q < 4; ++q) tap[q] = wrap(tap[q] + 1, n);
        }
    };

    const int d = grid_.d;
    // stride of one step along `axis`; lines are enumerated by the other axes
    std::int64_t stride = 1;
    for (int a = d - 1; a > axis; --a) stride *= n;
    if (d == 2) {
        if (axis == 0) {
            for (int j1 = 0; j1 < n; ++j1) line_shift(-0.5 + j1 * grid_.h, j1, n);
        } else {
            for (int j0 = 0; j0 < n; ++j0) line_shift(-0.5 + j0 * grid_.h, static_cast<std::int64_t>(j0) * n, 1);
        }
    } else {  // d == 3
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                std::int64_t base;
                double xc;
                if (axis == 0) {  // lines over j0, enumerated by (j1=a, j2=b), cross = 1
                    base = static_cast<std::int64_t>(a) * n + b;
                    xc = -0.5 + (cross == 1 ? a : b) * grid_.h;
                } else {  // axis == 1: lines over j1, enumerated by (j0=a, j2=b), cross = 0
                    base = static_cast<std::int64_t>(a) * n * n + b;
                    xc = -0.5 + (cross == 0 ? a : b) * grid_.h;
                }
                line_shift(xc, base, stride);
            }
    }
    samples_.swap(scratch_);
}

void TransportSolver::general_step(double dt_eff) {
    const int n = grid_.n;
    const int d = grid_.d;

    const long interval = switch_interval(flow_, t_);
    if (interval != u_interval_) {
        VectorField u = velocity(flow_, t_, grid_);
        for (int a = 0; a < d; ++a) u_[a] = u.comp(a).samples();
        u_interval_ = interval;
    }

    // Catmull-Rom interpolation of `data` at a position given in index units.
    auto interp = [&](const ArrayXd& data, const std::array<double, 3>& pos) {
        int base[3];
        double w[3][4];
        for (int a = 0; a < d; ++a) {
            const double fl = std::floor(pos[a]);
            base[a] = wrap_far(static_cast<long>(fl), n);
            cr_weights(pos[a] - fl, w[a]);
        }
        double acc = 0.0;
        if (d == 1) {
            for (int q = 0; q < 4; ++q) acc += w[0][q] * data[wrap_far(base[0] - 1 + q, n)];
        } else if (d == 2) {
            for (int q0 = 0; q0 < 4; ++q0) {
                const std::int64_t row = static_cast<std::int64_t>(wrap_far(base[0] - 1 + q0, n)) * n;
                double rowacc = 0.0;
                for (int q1 = 0; q1 < 4; ++q1) rowacc += w[1][q1] * data[row + wrap_far(base[1] - 1 + q1, n)];
                acc += w[0][q0] * rowacc;
            }
        } else {
            for (int q0 = 0; q0 < 4; ++q0)
                for (int q1 = 0; q1 < 4; ++q1) {
                    const std::int64_t row =
                        (static_cast<std::int64_t>(wrap_far(base[0] - 1 + q0, n)) * n + wrap_far(base[1] - 1 + q1, n)) * n;
                    double rowacc = 0.0;
                    for (int q2 = 0; q2 < 4; ++q2) rowacc += w[2][q2] * data[row + wrap_far(base[2] - 1 + q2, n)];
                    acc += w[0][q0] * w[1][q1] * rowacc;
                }
        }
        return acc;
    };

    auto vel_at = [&](const std::array<double, 3>& pos, double out[3]) {
        for (int a = 0; a < d; ++a) out[a] = interp(u_[a], pos) / grid_.h;  // index units per time
    };

    for_each_node(grid_, [&](std::int64_t idx, const std::array<double, 3>& x) {
        std::array<double, 3> p0{};
        for (int a = 0; a < d; ++a) p0[a] = (x[a] + 0.5) / grid_.h;  // node position in index units
        double k1[3], k2[3], k3[3], k4[3];
        std::array<double, 3> y{};
        vel_at(p0, k1);
        for (int a = 0; a < d; ++a) y[a] = p0[a] - 0.5 * dt_eff * k1[a];
        vel_at(y, k2);
        for (int a = 0; a < d; ++a) y[a] = p0[a] - 0.5 * dt_eff * k2[a];
        vel_at(y, k3);
        for (int a = 0; a < d; ++a) y[a] = p0[a] - dt_eff * k3[a];
        vel_at(y, k4);
        for (int a = 0; a < d; ++a) y[a] = p0[a] - dt_eff / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        scratch_[idx] = interp(samples_, y);
    });
    samples_.swap(scratch_);
}

ScalarField transport_solve(const ScalarField& rho0, const FlowSpec& flow, double t_end, double dt) {
    if (!(t_end >= 0.0)) throw config_error("transport: t_end must be >= 0");
    TransportSolver solver(rho0, flow, dt);
    solver.advance_to(t_end);
    return solver.state();
}

}  // namespace ksmix
