#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "ksmix/field.hpp"

namespace ksmix {

// Constants of the nonlinear maximum principle for (-Delta)^{alpha/2}: at a
// positive maximum x̄ of f, either
//   (-Delta)^{alpha/2} f(x̄) >= C_lower * f(x̄)^{1+p*alpha/d} / ||f||_p^{p*alpha/d}
// or
//   f(x̄) <= C_upper * ||f||_p.
// The radius R(f) below decides which branch the underlying proof activates:
// R <= M gives the lower bound, R > M the L^p domination.
struct MaxPrincipleConstants {
    double alpha = 0.0;
    int d = 0;
    double p = 0.0;
    double C_frac = 0.0;   // singular-integral normalization C_{alpha,d}
    double omega_d = 0.0;  // unit-ball volume
    double M = 0.25;       // recentering radius convention
    double C_lower = 0.0;
    double C_upper = 0.0;
};

// alpha in (0,2), d in {1,2,3}, p >= 1, M in (0, 1/2].
MaxPrincipleConstants lemma_constants(double alpha, int d, double p, double M = 0.25);

// R = (2/omega_d)^{1/d} * (2*||f||_p / f_max)^{p/d}; requires f_max > 0.
double optimal_radius(double f_max, double lp_norm, int d, double p);

enum class DichotomyFlag { LOWER_BOUND, LP_DOMINATED };

const char* to_string(DichotomyFlag f);

// Both branch inequalities of the dichotomy evaluated on one field, with the
// fractional Laplacian taken spectrally at the grid argmax.  Slacks are
// normalized by the larger side's magnitude (floor 1e-12), so "holds" means
// slack >= -1e-6 in relative terms.
struct DichotomyEval {
    double f_max = 0.0;
    std::array<int, 3> argmax{0, 0, 0};
    double lp_norm = 0.0;
    double lam_at_max = 0.0;  // (-Delta)^{alpha/2} f at the argmax node
    double radius = 0.0;      // proof radius R
    bool lower_active = false;  // R <= M
    double lower_lhs = 0.0, lower_rhs = 0.0, lower_slack = 0.0;  // want lhs >= rhs
    double upper_lhs = 0.0, upper_rhs = 0.0, upper_slack = 0.0;  // want lhs <= rhs
};

DichotomyEval evaluate_dichotomy(const ScalarField& f, const MaxPrincipleConstants& c);

// Falsification battery over random smooth fields normalized to max f = 1,
// plus a deterministic family of sharpening bumps (the near-extremal shape for
// the lower branch).  Per trial the slack of the radius-designated branch must
// be >= -1e-6; the report also carries the disjunction slack (best branch per
// trial) and tightness ratios lhs/rhs, which document how conservative the
// constants are in practice.
struct FalsifyReport {
    double alpha = 0.0;
    int d = 0;
    double p = 0.0;
    int n = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    long lower_branch_trials = 0;
    long upper_branch_trials = 0;
    long violations = 0;           // designated-branch relative slack < -1e-6
    long dichotomy_failures = 0;   // neither branch holds within tolerance
    double min_slack = 0.0;        // min over trials, designated branch, relative
    double min_disjunction_slack = 0.0;  // min over trials of the better branch
    double tightness_lower = 0.0;  // max rhs/lhs over lower-branch trials
    double tightness_upper = 0.0;  // max lhs/rhs over upper-branch trials
};

FalsifyReport falsify(double alpha, int d, double p, int trials, std::uint64_t seed);
// Override the constants (e.g. deliberately corrupted) to probe sensitivity.
FalsifyReport falsify(const MaxPrincipleConstants& consts, int trials, std::uint64_t seed);

std::string falsify_report_json(const FalsifyReport& r);

}  // namespace ksmix
