#pragma once
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ksmix/field.hpp"
#include "ksmix/flows.hpp"
#include "ksmix/initial_data.hpp"

namespace ksmix {

enum class DtPolicyKind { FIXED, CFL };

struct DtPolicy {
    DtPolicyKind kind = DtPolicyKind::CFL;
    double dt = 1e-3;    // FIXED step size
    double c_adv = 0.4;  // CFL advective safety factor
    double c_max = 1e-2; // CFL step ceiling
};

enum class SimStatus { RUNNING, COMPLETED, BLOWUP, FAILED };
const char* to_string(SimStatus s);

struct SimConfig {
    int d = 2;
    int n = 64;
    double alpha = 1.0;      // dissipation order, (0,2]
    double beta = 2.0;       // drift-kernel parameter, [2, max(d,2)]
    FlowSpec flow;
    InitialSpec initial;
    DtPolicy dt_policy;
    double t_end = 1.0;
    long diag_every = 100;   // diagnostic cadence in steps
    double blowup_threshold = 1e3;  // multiple of the initial sup norm
    double blowup_tail_frac = 0.01; // spectral-tail mass confirming focusing
    double positivity_tol = 1e-6;   // relative negative excursion = FAILED
    std::vector<double> p_list{1.0, 2.0, 4.0, p_inf};
    double dichotomy_p = 2.0;       // L^p used for the per-record dichotomy
    std::uint64_t seed = 0;
    bool drift_enabled = true;      // false: pure advection-dissipation
};

void validate_config(const SimConfig& cfg);

struct BlowupCertificate {
    double t = 0.0;
    double linf = 0.0;
    double linf_ratio = 0.0;     // vs the initial sup norm
    double tail_fraction = 0.0;  // top-third-band share of the fluctuation energy
};

struct SimState {
    double t = 0.0;
    ScalarField rho;
    long step_count = 0;
    SimStatus status = SimStatus::RUNNING;
    double rho0_linf = 0.0;
    double rho0_mean = 0.0;
    std::optional<BlowupCertificate> blowup;
    std::string failure;  // human-readable cause when status == FAILED
    // Fluctuation-energy budget integrated at step resolution over [0, t):
    // decay_dissip_cum = int 2*||rho||^2_{H^{alpha/2}} ds,
    // decay_growth_cum = int 6*(||rho||_inf + mean)*||rho - mean||_2^2 ds.
    // A coarse record cadence cannot reconstruct these from endpoint values.
    double decay_dissip_cum = std::numeric_limits<double>::quiet_NaN();
    double decay_growth_cum = std::numeric_limits<double>::quiet_NaN();
};

// Integrating-factor (Lawson) RK4 stepper: the dissipation multiplier
// exp(-|kappa|^alpha t) is applied exactly, the dealiased advection +
// chemotaxis terms N(rho) = -div(rho*(A u + B(rho))) go through RK4 stages.
// N is an exact divergence, so the mean coefficient never changes bitwise.
class Evolver {
  public:
    explicit Evolver(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const Grid& grid() const { return g_; }
    double t() const { return t_; }
    long step_count() const { return step_count_; }
    SimStatus status() const { return status_; }
    SimState snapshot() const;

    // Dealiased N at the current state; mean(N) = 0 to rounding.
    ScalarField rhs_nonlinear();

    // min(c_adv*h / max_x sum_a(|A u_a| + |B_a|), c_max); c_max when the state
    // is motionless.  FIXED policy ignores this.
    double cfl_dt();

    // One Lawson-RK4 step.  Before moving, the current state is screened:
    // non-finite samples -> FAILED; sup norm past blowup_threshold with a hot
    // spectral tail -> BLOWUP; negative excursion past positivity_tol ->
    // FAILED.  On a terminal status the state is left at the pre-step time.
    void step(double dt);

    // Certify the current state the way step() would (used at t_end).
    void final_check();

  private:
    void refresh_velocity();
    void load_state_samples();  // spec_ -> w_, runs the screening
    void nonlinear(const ArrayXcd& in_spec, const ArrayXd& in_samples, ArrayXcd& out);
    void stage_samples(const ArrayXcd& s);  // s -> w_
    double tail_fraction() const;
    void build_tables();

    SimConfig cfg_;
    Grid g_;
    double t_ = 0.0;
    long step_count_ = 0;
    SimStatus status_ = SimStatus::RUNNING;
    double rho0_linf_ = 0.0, rho0_mean_ = 0.0;
    std::optional<BlowupCertificate> blowup_;
    std::string failure_;
    double state_linf_ = 0.0;    // ||rho||_inf of the last screened state
    double intd_cum_ = 0.0;      // int 2*||rho||^2_{H^{alpha/2}} over [0, t)
    double intg_cum_ = 0.0;      // int 6*(||rho||_inf+mean)*||rho-mean||_2^2

    ArrayXcd spec_;  // authoritative state
    ArrayXd kalpha_, mask_;      // |kappa|^alpha, dealias mask
    ArrayXd wmode_;              // Parseval weight per mode, zero at k = 0
    ArrayXd bmul_[3], dmul_[3];  // drift and derivative multipliers (x i)
    double exp_dt_ = -1.0;       // dt the exponential tables were built for
    ArrayXd E_, E2_;             // exp(-|kappa|^alpha dt/2), squared
    long u_interval_ = -1;
    bool has_flow_ = false;
    ArrayXd u_[3];               // cached A*u samples for the current interval

    ArrayXd w_, flux_, b_;       // sample-space scratch
    ArrayXcd k1_, k2_, k3_, k4_, s_, tmpc_;
};

// Drives an Evolver from t=0 to cfg.t_end with step snapping to switch
// instants.  `record` fires on the initial state, every diag_every steps, and
// on the terminal state.  Returns the terminal state.
using RecordFn = std::function<void(const Evolver&)>;
SimState run_loop(const SimConfig& cfg, const RecordFn& record);

}  // namespace ksmix
