#pragma once
#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksmix/evolve.hpp"
#include "ksmix/maxprinciple.hpp"

namespace ksmix {

// One per-time diagnostic row.  mass is the L1 norm (= mean while rho >= 0);
// rho_tilde is the running maximum and argmax its node (lexicographic
// tie-break); l2_fluct = ||rho - mean||_2; hs_half the homogeneous H^{alpha/2}
// seminorm; h3 = ||rho||_2 + homogeneous H^3 seminorm.
struct DiagRecord {
    double t = 0.0;
    double mass = 0.0;
    double mean_rho = 0.0;
    double min_rho = 0.0;
    double rho_tilde = 0.0;
    std::array<int, 3> argmax_idx{0, 0, 0};
    std::array<double, 3> argmax_x{0.0, 0.0, 0.0};
    double l2_fluct = 0.0;
    double hs_half = 0.0;
    double h3 = 0.0;
    std::vector<std::pair<double, double>> lp;  // (p, ||rho||_p) per config p_list
    double fraclap_at_max = 0.0;  // (-Delta)^{alpha/2} rho at the argmax
    DichotomyFlag dichotomy = DichotomyFlag::LP_DOMINATED;
    // Cumulative energy-budget integrals carried by live runs (NaN on
    // synthetic series; see SimState for the integrands).
    double decay_dissip_cum = std::numeric_limits<double>::quiet_NaN();
    double decay_growth_cum = std::numeric_limits<double>::quiet_NaN();
};

struct DiagSeries {
    int d = 0, n = 0;
    double alpha = 0.0, beta = 0.0;
    std::vector<double> p_list;
    double dichotomy_p = 2.0;
    std::vector<DiagRecord> records;
};

// Precomputed per-run context for building records.
class DiagContext {
  public:
    explicit DiagContext(const SimConfig& cfg);
    DiagRecord record(const SimState& st) const;
    DiagSeries empty_series() const;

  private:
    int d_, n_;
    double alpha_, beta_, dichotomy_p_;
    std::vector<double> p_list_;
    std::optional<MaxPrincipleConstants> consts_;  // absent at alpha = 2
};

struct RunResult {
    SimState state;
    DiagSeries series;
};

// run_loop plus record collection.
RunResult run(const SimConfig& cfg);

// Dichotomy with explicit tolerance semantics: LOWER_BOUND when the damping
// inequality holds within eps = 1e-6 * scale, else LP_DOMINATED when the L^p
// bound holds within eps; throws verification_error when neither does (the
// disjunction is a theorem).
DichotomyFlag maxprinciple_dichotomy(const ScalarField& f, double alpha, double p,
                                     const MaxPrincipleConstants& consts);

// One verified inequality instance, JSON-ready.
struct CheckRow {
    std::string check;
    double t = 0.0;
    double lhs = 0.0, rhs = 0.0, slack = 0.0;
    bool pass = true;
};

// Forward-difference check of the running-maximum ODE bound
//   D rho_tilde / Dt <= Q - C_lower * rho_tilde^{1+p*alpha/d} / ||rho||_p^{p*alpha/d},
// Q = rho_tilde*(rho_tilde - mean) at beta = d, Q = C0*rho_tilde^2 at beta < d.
// The damping term is only applied on records whose dichotomy flag is
// LOWER_BOUND (elsewhere Q alone still bounds, the fractional term being
// nonnegative at a maximum).  Pairs whose argmax moves by more than 2h are
// excluded and counted.  Tolerance band: 0.05 * max(rho_tilde^2, |rhs|).
struct OdeBoundReport {
    int checked = 0;
    int excluded_jumps = 0;
    int lp_dominated_pairs = 0;
    double min_slack = 0.0;  // most adverse (rhs + tol - lhs), absolute units
    CheckRow worst;          // the min-slack pair (left default when checked == 0)
    std::vector<CheckRow> violations;
    bool pass = true;
};
OdeBoundReport check_ode_bound(const DiagSeries& series, double alpha, double p, double beta, double C0);

// Forward-difference check of the fluctuation-energy inequality
//   D(l2_fluct^2)/Dt <= -2*hs_half^2 + 6*(||rho||_inf + mean)*l2_fluct^2
// with a 5% band on the dominant term.  When both records of a pair carry
// the cumulative budget integrals, the right side is their window average
// (the inequality holds pointwise in t, so a coarse cadence must be tested
// against the window integral, not an endpoint value); otherwise the left
// record's values stand in, which is only meaningful when the cadence
// resolves the dynamics.
struct L2DecayReport {
    int checked = 0;
    double min_slack = 0.0;
    CheckRow worst;  // the min-slack pair (left default when checked == 0)
    std::vector<CheckRow> violations;
    bool pass = true;
};
L2DecayReport check_l2_decay(const DiagSeries& series);

// Time average over [0,T] of the low-mode energy ||P_N w(t)||_2^2 of the
// transported field under amplitude A (trapezoid rule, <=512 uniform samples).
// rho0 must be mean-zero with unit L2 norm.
double rage_average(const ScalarField& rho0, const FlowSpec& flow, double A, int N, double T);

// L2 distance at t_probe between the full evolution and the pure transport of
// the same initial datum under the same flow at amplitude A.  If the evolution
// terminates before t_probe the status is reported and the distance omitted.
struct ApproxResult {
    SimStatus status = SimStatus::COMPLETED;
    std::optional<double> distance;
};
ApproxResult approximation_distance(const SimConfig& cfg, double A, double t_probe);

struct CheckResult {
    double lhs = 0.0, rhs = 0.0, slack = 0.0;
    bool pass = true;
};

// (2/p) * ||(-Delta)^{alpha/4} |f|^{p/2}||_2^2 <= integral |f|^{p-2} f (-Delta)^{alpha/2} f,
// slack tolerance 1e-8 * ||f||_p^p.  Requires p >= 2.
CheckResult check_cordoba(const ScalarField& f, double alpha, double p);

// |mean((-Delta)^{alpha/2} f)| <= 1e-13 * ||f||_2.
CheckResult check_meanzero(const ScalarField& f, double alpha);

// Empirical surrogate for the beta < d quadratic coefficient: twice the
// largest ||(-Delta)^{(beta-d)/2}(rho - mean)||_inf / ||rho||_inf over a fixed
// random battery.
double estimate_c0(const Grid& g, double beta, int trials, std::uint64_t seed);

// CSV serialization, 17 significant digits, fixed header per (d, p_list).
std::string diag_csv_header(const DiagSeries& s);
void write_diag_csv(const std::string& path, const DiagSeries& s);
std::string check_rows_json(const std::vector<CheckRow>& rows);

}  // namespace ksmix
