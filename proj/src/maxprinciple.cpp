#include "ksmix/maxprinciple.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "ksmix/errors.hpp"
#include "ksmix/initial_data.hpp"
#include "ksmix/operators.hpp"

namespace ksmix {

namespace {
double unit_ball_volume(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return M_PI;
        case 3: return 4.0 * M_PI / 3.0;
        default: throw config_error("unit_ball_volume: d must be 1, 2 or 3");
    }
}

// Relative slack of "want >= 0" quantity against the larger side's magnitude.
double rel(double diff, double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
    return diff / scale;
}
}  // namespace

const char* to_string(DichotomyFlag f) {
    return f == DichotomyFlag::LOWER_BOUND ? "LOWER_BOUND" : "LP_DOMINATED";
}

MaxPrincipleConstants lemma_constants(double alpha, int d, double p, double M) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw config_error("lemma_constants: alpha must lie in (0,2) (got " + std::to_string(alpha) + ")");
    if (d < 1 || d > 3) throw config_error("lemma_constants: d must be 1, 2 or 3");
    if (!(p >= 1.0)) throw config_error("lemma_constants: p must be >= 1 (got " + std::to_string(p) + ")");
    if (!(M > 0.0 && M <= 0.5))
        throw config_error("lemma_constants: M must lie in (0, 1/2] (got " + std::to_string(M) + ")");

    MaxPrincipleConstants c;
    c.alpha = alpha;
    c.d = d;
    c.p = p;
    c.M = M;
    c.C_frac = frac_constant(alpha, d);
    c.omega_d = unit_ball_volume(d);
    const double dd = static_cast<double>(d);
    c.C_lower = c.C_frac * std::pow(2.0, p) /
                (2.0 * std::pow(2.0 / c.omega_d, (dd + alpha) / dd) * std::pow(2.0, p * (dd + alpha) / dd));
    c.C_upper = 2.0 / (std::pow(M, dd / p) * std::pow(c.omega_d / 2.0, 1.0 / p));
    return c;
}

double optimal_radius(double f_max, double lp_norm, int d, double p) {
    if (!(f_max > 0.0))
        throw input_error("optimal_radius: f_max must be positive (got " + std::to_string(f_max) + ")");
    const double dd = static_cast<double>(d);
    return std::pow(2.0 / unit_ball_volume(d), 1.0 / dd) * std::pow(2.0 * lp_norm / f_max, p / dd);
}

DichotomyEval evaluate_dichotomy(const ScalarField& f, const MaxPrincipleConstants& c) {
    const Grid& g = f.grid();
    if (g.d != c.d) throw input_error("evaluate_dichotomy: field dimension does not match the constants");

    DichotomyEval e;
    const ArrayXd& s = f.samples();
    std::int64_t best = 0;
    for (std::int64_t i = 1; i < g.cells; ++i)
        if (s[i] > s[best]) best = i;  // row-major scan = lexicographic tie-break
    e.f_max = s[best];
    if (!(e.f_max > 0.0)) throw input_error("evaluate_dichotomy: max f must be positive");
    std::int64_t r = best;
    for (int a = g.d - 1; a >= 0; --a) {
        e.argmax[a] = static_cast<int>(r % g.n);
        r /= g.n;
    }

    e.lp_norm = lp_norm(f, c.p);
    e.lam_at_max = frac_laplacian(f, c.alpha).samples()[best];
    e.radius = optimal_radius(e.f_max, e.lp_norm, c.d, c.p);
    e.lower_active = e.radius <= c.M;

    const double dd = static_cast<double>(c.d);
    e.lower_lhs = e.lam_at_max;
    e.lower_rhs = c.C_lower * std::pow(e.f_max, 1.0 + c.p * c.alpha / dd) /
                  std::pow(e.lp_norm, c.p * c.alpha / dd);
    e.lower_slack = rel(e.lower_lhs - e.lower_rhs, e.lower_lhs, e.lower_rhs);
    e.upper_lhs = e.f_max;
    e.upper_rhs = c.C_upper * e.lp_norm;
    e.upper_slack = rel(e.upper_rhs - e.upper_lhs, e.upper_lhs, e.upper_rhs);
    return e;
}

FalsifyReport falsify(double alpha, int d, double p, int trials, std::uint64_t seed) {
    return falsify(lemma_constants(alpha, d, p), trials, seed);
}

FalsifyReport falsify(const MaxPrincipleConstants& consts, int trials, std::uint64_t seed) {
    if (trials < 1) throw config_error("falsify: trials must be >= 1");

    FalsifyReport rep;
    rep.alpha = consts.alpha;
    rep.d = consts.d;
    rep.p = consts.p;
    rep.trials = trials;
    rep.seed = seed;
    rep.n = consts.d == 1 ? 256 : (consts.d == 2 ? 64 : 32);
    rep.min_slack = std::numeric_limits<double>::infinity();
    rep.min_disjunction_slack = std::numeric_limits<double>::infinity();
    const Grid g = make_grid(consts.d, rep.n);

    // Sharpening bumps probe the lower branch where it is tightest; the rest
    // of the battery is random smooth fields with mixed spectral decay.
    const int bump_trials = std::min(trials / 4, 24);
    const double w_hi = 0.2, w_lo = 4.0 * g.h;
    for (int t = 0; t < trials; ++t) {
        ScalarField f;
        if (t < bump_trials) {
            const double frac = bump_trials == 1 ? 0.0 : static_cast<double>(t) / (bump_trials - 1);
            const double w = w_hi * std::pow(w_lo / w_hi, frac);
            f = bump_field(g, 1.0, w, {0.0, 0.0, 0.0});
            f = ScalarField::from_samples(g, f.samples() / lp_norm(f, p_inf));
        } else {
            const double decay = 3.0 + (t % 3);
            f = random_smooth_field(g, seed + static_cast<std::uint64_t>(t), decay);
            ArrayXd s = f.samples();
            const double mx = s.maxCoeff();
            const double mn = s.minCoeff();
            // positive-max normalization: flip if needed, then scale max to 1
            if (mx <= 0.0 || -mn > mx) s = -s;
            f = ScalarField::from_samples(g, s / std::max(s.maxCoeff(), 1e-300));
        }

        const DichotomyEval e = evaluate_dichotomy(f, consts);
        const double designated = e.lower_active ? e.lower_slack : e.upper_slack;
        const double disjunction = std::max(e.lower_slack, e.upper_slack);
        (e.lower_active ? rep.lower_branch_trials : rep.upper_branch_trials)++;
        rep.min_slack = std::min(rep.min_slack, designated);
        rep.min_disjunction_slack = std::min(rep.min_disjunction_slack, disjunction);
        if (designated < -1e-6) rep.violations++;
        if (disjunction < -1e-6) rep.dichotomy_failures++;
        if (e.lower_active && e.lower_lhs > 0.0)
            rep.tightness_lower = std::max(rep.tightness_lower, e.lower_rhs / e.lower_lhs);
        if (!e.lower_active && e.upper_rhs > 0.0)
            rep.tightness_upper = std::max(rep.tightness_upper, e.upper_lhs / e.upper_rhs);
    }
    return rep;
}

std::string falsify_report_json(const FalsifyReport& r) {
    nlohmann::json j{{"alpha", r.alpha},
                     {"d", r.d},
                     {"p", r.p},
                     {"n", r.n},
                     {"trials", r.trials},
                     {"seed", r.seed},
                     {"lower_branch_trials", r.lower_branch_trials},
                     {"upper_branch_trials", r.upper_branch_trials},
                     {"violations", r.violations},
                     {"dichotomy_failures", r.dichotomy_failures},
                     {"min_slack", r.min_slack},
                     {"min_disjunction_slack", r.min_disjunction_slack},
                     {"tightness_lower", r.tightness_lower},
                     {"tightness_upper", r.tightness_upper}};
    return j.dump(2);
}

}  // namespace ksmix
