#pragma once
#include "ksmix/field.hpp"
#include "ksmix/flows.hpp"

namespace ksmix {

// Semi-Lagrangian solver for the pure advection equation dw/dt + u.grad w = 0:
// each node is traced backward along the (piecewise-steady) characteristics
// with RK4 and the field is interpolated there by periodic Catmull-Rom cubic
// convolution (bicubic for d=2, tricubic for d=3).  Shear flows shift whole
// grid lines by a per-line constant displacement, which reproduces the exact
// characteristics.  Steps are snapped to alternating-shear switch instants.
// Requires dt <= h / (2 * max|u|) so every backtrace stays within half a cell.
class TransportSolver {
  public:
    TransportSolver(const ScalarField& rho0, const FlowSpec& flow, double dt);

    double t() const { return t_; }
    ScalarField state() const;
    const ArrayXd& raw_samples() const { return samples_; }
    const Grid& grid() const { return grid_; }

    // Advance to target >= t(), landing on it exactly.
    void advance_to(double target);

  private:
    void step(double dt_eff);
    void shear_step(double dt_eff, int axis, int cross);
    void general_step(double dt_eff);
    double next_switch() const;

    Grid grid_;
    FlowSpec flow_;
    double dt_ = 0.0;
    double t_ = 0.0;
    ArrayXd samples_;
    ArrayXd scratch_;
    std::array<ArrayXd, 3> u_;  // cached velocity samples (general path)
    long u_interval_ = -1;      // switch interval the cache belongs to
};

// One-shot convenience wrapper.
ScalarField transport_solve(const ScalarField& rho0, const FlowSpec& flow, double t_end, double dt);

}  // namespace ksmix
