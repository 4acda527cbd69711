#pragma once
#include <memory>

#include "ksmix/field.hpp"

namespace ksmix {

enum class FlowKind { ZERO, STEADY_SHEAR, ALTERNATING_SHEAR, STREAM_FUNCTION };
enum class ShearProfile { SIN, COS };

// Incompressible velocity field with amplitude A.  Shears use the 1-D profile
// v(x) = sin(2*pi*x) or cos(2*pi*x); the alternating shear acts along the
// first axis with v(x_2) on even switch intervals and along the second axis
// with v(x_1) on odd ones.  STREAM_FUNCTION takes u = A * perp-grad(psi),
// d = 2 only.  Immutable and shareable.
struct FlowSpec {
    FlowKind kind = FlowKind::ZERO;
    double amplitude = 0.0;  // A >= 0
    ShearProfile profile = ShearProfile::SIN;
    double switch_period = 0.5;  // T_sw of the alternating shear
    std::shared_ptr<const ScalarField> stream;  // psi for STREAM_FUNCTION

    friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

const char* to_string(FlowKind k);

// Profile value v(x).
double shear_profile_value(ShearProfile p, double x);

// Index of the alternating-shear interval containing time t (even: x2-shear
// first); robust to t sitting within 1e-9*T_sw of a switch instant.
long switch_interval(const FlowSpec& flow, double t);

// Samples of A*u(t, .).
VectorField velocity(const FlowSpec& flow, double t, const Grid& g);

// max |div u| measured spectrally; <= 1e-11 * A for every built-in kind.
double check_divergence_free(const FlowSpec& flow, double t, const Grid& g);

// Largest |u| component magnitude the flow ever attains (for CFL bounds).
double max_speed(const FlowSpec& flow, const Grid& g);

void validate_flow(const FlowSpec& flow, const Grid& g);

}  // namespace ksmix
